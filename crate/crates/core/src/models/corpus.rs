//! The bundled corpus: positive instances that pass every gate and
//! negative instances that fail one intended gate.
//!
//! The JSON files under `corpus/` are generated from [`builtin`]; a test
//! keeps them in sync.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::gla::scalar::{int, Scalar};
use crate::gla::BasisElement;
use crate::models::ce::CeModel;
use crate::models::description::{
    load_path, AlgebraDescription, Expectation, InnerProductSpec, Instance, FORMAT, VERSION,
};
use crate::models::perturb::{drop_trace, seeded_flip, Target};
use crate::pipeline::{self, Overrides};

/// Seed used to choose the perturbed entry of generated negatives.
pub const PERTURB_SEED: u64 = 11;

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// [X_1, X_2] = X_3 on h3 ⊕ R.
pub fn heisenberg_plus_line() -> CeModel {
    CeModel {
        dim: 4,
        brackets: vec![(0, 1, 2, int(1))],
    }
}

/// Filiform n4: [X_1, X_2] = X_3, [X_1, X_3] = X_4.
pub fn filiform() -> CeModel {
    CeModel {
        dim: 4,
        brackets: vec![(0, 1, 2, int(1)), (0, 2, 3, int(1))],
    }
}

/// The one-dimensional algebra k with zero operators.
pub fn point() -> AlgebraDescription {
    AlgebraDescription {
        format: FORMAT.into(),
        version: VERSION,
        name: "point".into(),
        note: Some("ground field; one class, every structure trivial".into()),
        basis: Some(vec![BasisElement {
            label: "1".into(),
            degree: 0,
        }]),
        unit: Some("1".into()),
        multiplication: Some(vec![("1".into(), "1".into(), "1".into(), "1".into())]),
        deltas: Some(vec![Vec::new()]),
        trace: Some(vec![("1".into(), "1".into())]),
        generator: None,
        inner_product: None,
        truncation: None,
        expect: None,
    }
}

fn gen(name: &str, note: &str, m: &CeModel, pi: &[(usize, usize, Scalar)], eta: &[(usize, Scalar)]) -> AlgebraDescription {
    let mut d = AlgebraDescription::generated(name, m, pi, eta);
    d.note = Some(note.into());
    d
}

fn expect(mut d: AlgebraDescription, gate: &str, checks: &[&str]) -> AlgebraDescription {
    d.expect = Some(Expectation {
        fails_at: gate.into(),
        checks: checks.iter().map(|c| c.to_string()).collect(),
    });
    d
}

fn meets(d: &AlgebraDescription) -> bool {
    let Ok(inst) = crate::models::description::load(&d.to_json().unwrap_or_default()) else {
        return false;
    };
    let rep = pipeline::run(&inst, "pipeline", &Overrides::default());
    pipeline::meets_expectation(&inst, &rep)
}

pub fn positives() -> Vec<AlgebraDescription> {
    let h3 = CeModel::heisenberg();
    let one = int(1);
    let mut torus3_random = gen("torus3_random_ip", "T^3 with a seeded non-orthonormal inner product", &CeModel::abelian(3), &[], &[]);
    torus3_random.inner_product = Some(InnerProductSpec::Random { seed: 3 });
    let mut h3_star = gen("heisenberg_star_ip", "Heisenberg nilmanifold, inner product from the Hodge star", &h3, &[], &[]);
    h3_star.inner_product = Some(InnerProductSpec::Star);
    vec![
        point(),
        gen("torus2", "T^2: d = 0, no bivector", &CeModel::abelian(2), &[], &[]),
        gen("torus3", "T^3: d = 0, no bivector", &CeModel::abelian(3), &[], &[]),
        torus3_random,
        gen("heisenberg", "Heisenberg nilmanifold, d only", &h3, &[], &[]),
        h3_star,
        gen(
            "heisenberg_poisson",
            "Heisenberg nilmanifold with the Poisson bivector X1^X3; [X1, X3] = 0 so Delta_1 vanishes",
            &h3,
            &[(0, 2, one.clone())],
            &[],
        ),
        gen(
            "heisenberg_jacobi",
            "Heisenberg nilmanifold, Jacobi pair pi = X1^X2, eta = -X3",
            &h3,
            &[(0, 1, one.clone())],
            &[(2, int(-1))],
        ),
        gen(
            "h3xR_poisson",
            "h3 + R with the Poisson bivector X1^X4; Delta_1 vanishes",
            &heisenberg_plus_line(),
            &[(0, 3, one.clone())],
            &[],
        ),
        gen(
            "filiform_poisson",
            "filiform n4 with the Poisson bivector X1^X4; Delta_1 vanishes",
            &filiform(),
            &[(0, 3, one.clone())],
            &[],
        ),
        gen(
            "filiform_poisson_23",
            "filiform n4 with the Poisson bivector X2^X3; Delta_1 vanishes",
            &filiform(),
            &[(1, 2, one.clone())],
            &[],
        ),
        gen(
            "filiform_jacobi",
            "filiform n4, Jacobi pair pi = X1^X2, eta = -X3",
            &filiform(),
            &[(0, 1, one)],
            &[(2, int(-1))],
        ),
    ]
}

pub fn negatives() -> Result<Vec<AlgebraDescription>> {
    let h3 = CeModel::heisenberg();
    let one = int(1);
    let mut out = Vec::new();

    let base = gen("torus2_mult_flip", "T^2 with one product entry negated", &CeModel::abelian(2), &[], &[]);
    let (d, _) = seeded_flip(&base, Target::Multiplication, PERTURB_SEED, |c| {
        meets(&expect(c.clone(), "algebra", &["commutativity"]))
    })?;
    out.push(expect(d, "algebra", &["commutativity"]));

    let base = gen(
        "heisenberg_jacobi_delta_flip",
        "Heisenberg Jacobi pair with one entry of Delta_1 negated",
        &h3,
        &[(0, 1, one.clone())],
        &[(2, int(-1))],
    );
    let (d, _) = seeded_flip(&base, Target::Delta(1), PERTURB_SEED, |c| {
        meets(&expect(c.clone(), "bv", &["order[1]"]))
    })?;
    out.push(expect(d, "bv", &["order[1]"]));

    out.push(expect(
        gen(
            "filiform_pi12",
            "filiform n4, pi = X1^X2 without eta: not a Jacobi pair",
            &filiform(),
            &[(0, 1, one.clone())],
            &[],
        ),
        "bv",
        &["relation[2]"],
    ));
    out.push(expect(
        gen(
            "heisenberg_pi12",
            "Heisenberg, pi = X1^X2 without eta: BV but not degenerate",
            &h3,
            &[(0, 1, one)],
            &[],
        ),
        "degeneration",
        &["degenerates"],
    ));

    let base = gen("torus2_no_trace", "T^2 with the trace removed", &CeModel::abelian(2), &[], &[]);
    out.push(expect(drop_trace(&base)?, "cyclic", &["perfect", "trace_support"]));

    let mut d = gen(
        "heisenberg_random_ip",
        "Heisenberg with a seeded inner product whose h is not self-adjoint",
        &h3,
        &[],
        &[],
    );
    d.inner_product = Some(InnerProductSpec::Random { seed: 1 });
    out.push(expect(d, "h_compatibility", &["h_compatible"]));
    Ok(out)
}

pub fn builtin() -> Result<Vec<AlgebraDescription>> {
    let mut all = positives();
    all.extend(negatives()?);
    Ok(all)
}

pub fn file_name(d: &AlgebraDescription) -> String {
    format!("{}.json", d.name)
}

/// Writes the builtin corpus into `dir`.
pub fn write(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for d in builtin()? {
        let p = dir.join(file_name(&d));
        std::fs::write(&p, d.to_json()?)?;
        paths.push(p);
    }
    Ok(paths)
}

/// JSON files in `dir`, sorted by name.
pub fn list(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn load_dir(dir: &Path) -> Result<Vec<(PathBuf, Instance)>> {
    list(dir)?
        .into_iter()
        .map(|p| load_path(&p).map(|i| (p, i)))
        .collect()
}
