//! JSON description of an algebra instance.
//!
//! An instance is either explicit (basis, unit, multiplication table, Δ_k
//! matrices, trace) or generated from a Chevalley–Eilenberg block with an
//! optional bivector π and vector η. Generator indices in files are 1-based;
//! scalars are strings `"p"` or `"p/q"`.

use serde::{Deserialize, Serialize};

use crate::bv::BvAlgebra;
use crate::error::{Error, Result};
use crate::gla::scalar::{self, Scalar};
use crate::gla::{BasisElement, GradedMap, GradedSpace, SparseMatrix, SparseVec};
use crate::models::ce::{star_inner_product, CeModel};
use crate::retract::InnerProduct;
use std::sync::Arc;

pub const FORMAT: &str = "bvfrob-algebra";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDescription {
    pub format: String,
    pub version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<BasisElement>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    /// `(a, b, c, x)`: a · b has coefficient x on c.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplication: Option<Vec<(String, String, String, String)>>,
    /// `deltas[k]` lists `(source, target, x)`: Δ_k(source) has coefficient
    /// x on target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<Vec<(String, String, String)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<InnerProductSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    ChevalleyEilenberg {
        dim: usize,
        /// `(i, j, k, c)`: [X_i, X_j] has coefficient c on X_k.
        #[serde(default)]
        brackets: Vec<(usize, usize, usize, String)>,
        /// `(i, j, c)`: c X_i ∧ X_j.
        #[serde(default)]
        pi: Vec<(usize, usize, String)>,
        /// `(k, c)`: c X_k.
        #[serde(default)]
        eta: Vec<(usize, String)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnerProductSpec {
    Orthonormal,
    /// ⟨a, b⟩ = Tr(a · ★b); generator instances only.
    Star,
    Random { seed: u64 },
    Gram { entries: Vec<(String, String, String)> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

/// Intended outcome of a corpus instance; absent means every gate passes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub fails_at: String,
    /// Exact set of checks that fail in that gate; empty accepts any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
}

/// A loaded instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub description: AlgebraDescription,
    pub algebra: BvAlgebra,
    pub inner_product: InnerProduct,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_at(location: &str, s: &str) -> Result<Scalar> {
    scalar::parse(s).map_err(|_| schema(location, format!("cannot parse `{s}` as a rational")))
}

fn canonical_scalar(location: &str, s: &str) -> Result<String> {
    Ok(scalar::format(&parse_at(location, s)?))
}

pub fn from_json(text: &str) -> Result<AlgebraDescription> {
    let d: AlgebraDescription = serde_json::from_str(text).map_err(|e| {
        schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    if d.format != FORMAT {
        return Err(schema("format", format!("expected `{FORMAT}`, got `{}`", d.format)));
    }
    if d.version != VERSION {
        return Err(schema("version", format!("unsupported version {}", d.version)));
    }
    Ok(d)
}

impl AlgebraDescription {
    /// Explicit description of an algebra.
    pub fn explicit(name: impl Into<String>, a: &BvAlgebra) -> Self {
        let sp = a.space();
        let lab = |i: usize| sp.label(i).to_string();
        let multiplication = a
            .mult_entries()
            .into_iter()
            .map(|(i, j, k, c)| (lab(i), lab(j), lab(k), scalar::format(&c)))
            .collect();
        let deltas = a
            .deltas()
            .iter()
            .map(|dk| {
                dk.matrix()
                    .triplets()
                    .map(|(r, c, x)| (lab(c), lab(r), scalar::format(x)))
                    .collect()
            })
            .collect();
        let trace = a
            .trace()
            .map(|t| t.iter().map(|(i, x)| (lab(i), scalar::format(x))).collect());
        Self {
            format: FORMAT.into(),
            version: VERSION,
            name: name.into(),
            note: None,
            basis: Some(sp.basis().to_vec()),
            unit: Some(lab(a.unit())),
            multiplication: Some(multiplication),
            deltas: Some(deltas),
            trace,
            generator: None,
            inner_product: None,
            truncation: None,
            expect: None,
        }
    }

    pub fn generated(name: impl Into<String>, model: &CeModel, pi: &[(usize, usize, Scalar)], eta: &[(usize, Scalar)]) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            name: name.into(),
            note: None,
            basis: None,
            unit: None,
            multiplication: None,
            deltas: None,
            trace: None,
            generator: Some(Generator::ChevalleyEilenberg {
                dim: model.dim,
                brackets: model
                    .brackets
                    .iter()
                    .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, scalar::format(c)))
                    .collect(),
                pi: pi.iter().map(|(i, j, c)| (i + 1, j + 1, scalar::format(c))).collect(),
                eta: eta.iter().map(|(k, c)| (k + 1, scalar::format(c))).collect(),
            }),
            inner_product: None,
            truncation: None,
            expect: None,
        }
    }

    fn is_explicit(&self) -> bool {
        self.basis.is_some()
            || self.unit.is_some()
            || self.multiplication.is_some()
            || self.deltas.is_some()
            || self.trace.is_some()
    }

    fn space(&self) -> Result<Arc<GradedSpace>> {
        let basis = self.basis.clone().ok_or_else(|| schema("basis", "missing"))?;
        Ok(Arc::new(GradedSpace::new(basis)?))
    }

    /// Builds the algebra (without running any validator).
    pub fn algebra(&self) -> Result<BvAlgebra> {
        match (&self.generator, self.is_explicit()) {
            (Some(_), true) => Err(schema("generator", "both explicit data and a generator block")),
            (None, false) => Err(schema("basis", "neither explicit data nor a generator block")),
            (Some(g), false) => {
                let (model, pi, eta) = generator_parts(g)?;
                model.jacobi_model(&pi, &eta)
            }
            (None, true) => self.explicit_algebra(),
        }
    }

    fn explicit_algebra(&self) -> Result<BvAlgebra> {
        let sp = self.space()?;
        let idx = |l: &str| sp.index_of(l);
        let unit = idx(self.unit.as_deref().ok_or_else(|| schema("unit", "missing"))?)?;
        let mut mult = Vec::new();
        for (n, (a, b, c, x)) in self.multiplication.iter().flatten().enumerate() {
            let loc = format!("multiplication[{n}]");
            mult.push((idx(a)?, idx(b)?, idx(c)?, parse_at(&loc, x)?));
        }
        let blocks = self.deltas.clone().ok_or_else(|| schema("deltas", "missing (need at least d)"))?;
        if blocks.is_empty() {
            return Err(schema("deltas", "needs at least d"));
        }
        let mut deltas = Vec::new();
        for (k, entries) in blocks.iter().enumerate() {
            let deg = 1 - 2 * k as i32;
            let mut m = SparseMatrix::zeros(sp.dim(), sp.dim());
            for (n, (s, t, x)) in entries.iter().enumerate() {
                let loc = format!("deltas[{k}][{n}]");
                let (s, t) = (idx(s)?, idx(t)?);
                if sp.degree(t) != sp.degree(s) + deg {
                    return Err(Error::DegreeInconsistency(format!(
                        "{loc}: {} -> {} under an operator of degree {deg}",
                        sp.label(s),
                        sp.label(t)
                    )));
                }
                m.add_entry(t, s, &parse_at(&loc, x)?);
            }
            deltas.push(GradedMap::new(sp.clone(), sp.clone(), deg, m)?);
        }
        let trace = match &self.trace {
            None => None,
            Some(t) => {
                let mut v = SparseVec::new();
                for (n, (l, x)) in t.iter().enumerate() {
                    v.add_at(idx(l)?, &parse_at(&format!("trace[{n}]"), x)?);
                }
                Some(v)
            }
        };
        BvAlgebra::new(sp, unit, mult, deltas, trace)
    }

    pub fn inner_product(&self, a: &BvAlgebra) -> Result<InnerProduct> {
        let sp = a.space().clone();
        match self.inner_product.as_ref().unwrap_or(&InnerProductSpec::Orthonormal) {
            InnerProductSpec::Orthonormal => Ok(InnerProduct::orthonormal(sp)),
            InnerProductSpec::Random { seed } => Ok(InnerProduct::random(sp, *seed)),
            InnerProductSpec::Star => match &self.generator {
                Some(g) => star_inner_product(&generator_parts(g)?.0),
                None => Err(schema("inner_product", "`star` needs a generator block")),
            },
            InnerProductSpec::Gram { entries } => {
                let mut m = SparseMatrix::zeros(sp.dim(), sp.dim());
                for (n, (a, b, x)) in entries.iter().enumerate() {
                    let x = parse_at(&format!("inner_product.entries[{n}]"), x)?;
                    m.set(sp.index_of(a)?, sp.index_of(b)?, x);
                }
                InnerProduct::from_gram(sp, m)
            }
        }
    }

    /// Normalized scalars, sorted entries, explicit form kept explicit.
    pub fn canonicalize(&self) -> Result<Self> {
        let mut d = self.clone();
        if let Some(g) = &mut d.generator {
            let Generator::ChevalleyEilenberg {
                brackets, pi, eta, ..
            } = g;
            for (n, e) in brackets.iter_mut().enumerate() {
                e.3 = canonical_scalar(&format!("generator.brackets[{n}]"), &e.3)?;
            }
            for (n, e) in pi.iter_mut().enumerate() {
                e.2 = canonical_scalar(&format!("generator.pi[{n}]"), &e.2)?;
            }
            for (n, e) in eta.iter_mut().enumerate() {
                e.1 = canonical_scalar(&format!("generator.eta[{n}]"), &e.1)?;
            }
            brackets.sort();
            pi.sort();
            eta.sort();
        }
        if d.is_explicit() {
            let sp = d.space()?;
            let pos = |l: &str| sp.index_of(l);
            if let Some(m) = &mut d.multiplication {
                for (n, e) in m.iter_mut().enumerate() {
                    e.3 = canonical_scalar(&format!("multiplication[{n}]"), &e.3)?;
                }
                let mut keyed = m
                    .drain(..)
                    .map(|e| Ok(((pos(&e.0)?, pos(&e.1)?, pos(&e.2)?), e)))
                    .collect::<Result<Vec<_>>>()?;
                keyed.sort_by(|a, b| a.0.cmp(&b.0));
                *m = keyed.into_iter().map(|(_, e)| e).collect();
            }
            if let Some(ds) = &mut d.deltas {
                for (k, block) in ds.iter_mut().enumerate() {
                    for (n, e) in block.iter_mut().enumerate() {
                        e.2 = canonical_scalar(&format!("deltas[{k}][{n}]"), &e.2)?;
                    }
                    let mut keyed = block
                        .drain(..)
                        .map(|e| Ok(((pos(&e.0)?, pos(&e.1)?), e)))
                        .collect::<Result<Vec<_>>>()?;
                    keyed.sort_by(|a, b| a.0.cmp(&b.0));
                    *block = keyed.into_iter().map(|(_, e)| e).collect();
                }
            }
            if let Some(t) = &mut d.trace {
                for (n, e) in t.iter_mut().enumerate() {
                    e.1 = canonical_scalar(&format!("trace[{n}]"), &e.1)?;
                }
                let mut keyed = t
                    .drain(..)
                    .map(|e| Ok((pos(&e.0)?, e)))
                    .collect::<Result<Vec<_>>>()?;
                keyed.sort_by(|a, b| a.0.cmp(&b.0));
                *t = keyed.into_iter().map(|(_, e)| e).collect();
            }
        }
        if let Some(InnerProductSpec::Gram { entries }) = &mut d.inner_product {
            for (n, e) in entries.iter_mut().enumerate() {
                e.2 = canonical_scalar(&format!("inner_product.entries[{n}]"), &e.2)?;
            }
            entries.sort();
        }
        Ok(d)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.canonicalize()?)?;
        s.push('\n');
        Ok(s)
    }
}

fn generator_parts(g: &Generator) -> Result<(CeModel, Vec<(usize, usize, Scalar)>, Vec<(usize, Scalar)>)> {
    let Generator::ChevalleyEilenberg {
        dim,
        brackets,
        pi,
        eta,
    } = g;
    let dim = *dim;
    if dim == 0 || dim > 12 {
        return Err(schema("generator.dim", format!("{dim} is outside 1..=12")));
    }
    let ix = |loc: String, i: usize| -> Result<usize> {
        if i == 0 || i > dim {
            Err(schema(loc, format!("generator index {i} outside 1..={dim}")))
        } else {
            Ok(i - 1)
        }
    };
    let mut br = Vec::new();
    for (n, (i, j, k, c)) in brackets.iter().enumerate() {
        let loc = format!("generator.brackets[{n}]");
        br.push((ix(loc.clone(), *i)?, ix(loc.clone(), *j)?, ix(loc.clone(), *k)?, parse_at(&loc, c)?));
    }
    let mut p = Vec::new();
    for (n, (i, j, c)) in pi.iter().enumerate() {
        let loc = format!("generator.pi[{n}]");
        p.push((ix(loc.clone(), *i)?, ix(loc.clone(), *j)?, parse_at(&loc, c)?));
    }
    let mut e = Vec::new();
    for (n, (k, c)) in eta.iter().enumerate() {
        let loc = format!("generator.eta[{n}]");
        e.push((ix(loc.clone(), *k)?, parse_at(&loc, c)?));
    }
    Ok((CeModel { dim, brackets: br }, p, e))
}

/// Parses, canonicalizes and builds an instance.
pub fn load(text: &str) -> Result<Instance> {
    let description = from_json(text)?.canonicalize()?;
    let algebra = description.algebra()?;
    let inner_product = description.inner_product(&algebra)?;
    Ok(Instance {
        description,
        algebra,
        inner_product,
    })
}

pub fn load_path(path: &std::path::Path) -> Result<Instance> {
    load(&std::fs::read_to_string(path)?)
}

pub fn save(instance: &Instance) -> Result<String> {
    instance.description.to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gla::scalar::int;
    use crate::retract::cohomology;

    const MINIMAL: &str = r#"{
        "format": "bvfrob-algebra", "version": 1, "name": "lambda2",
        "basis": [{"label": "1", "degree": 0}, {"label": "t1", "degree": 1},
                  {"label": "t2", "degree": 1}, {"label": "t1t2", "degree": 2}],
        "unit": "1",
        "multiplication": [["t2", "t1", "t1t2", "-1"], ["1", "1", "1", "1"], ["1", "t1", "t1", "1"],
            ["t1", "1", "t1", "1"], ["1", "t2", "t2", "1"], ["t2", "1", "t2", "1"],
            ["1", "t1t2", "t1t2", "1"], ["t1t2", "1", "t1t2", "1"], ["t1", "t2", "t1t2", "2/2"]],
        "deltas": [[]],
        "trace": [["t1t2", "1"]]
    }"#;

    #[test]
    fn minimal_exterior_file() {
        let inst = load(MINIMAL).unwrap();
        let coh = cohomology(&inst.algebra, &inst.inner_product).unwrap();
        assert_eq!(coh.betti(), vec![(0, 1), (1, 2), (2, 1)]);
        let again = load(&save(&inst).unwrap()).unwrap();
        assert_eq!(save(&again).unwrap(), save(&inst).unwrap());
        assert!(!save(&inst).unwrap().contains("2/2"));
    }

    #[test]
    fn dangling_label_is_named() {
        let bad = MINIMAL.replace("[\"t1t2\", \"1\"]]", "[\"t1t3\", \"1\"]]");
        match load(&bad) {
            Err(Error::UnknownLabel(l)) => assert_eq!(l, "t1t3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_location() {
        let bad = MINIMAL.replace("\"version\": 1", "\"version\": 1, \"colour\": 3");
        assert!(matches!(load(&bad), Err(Error::Schema { .. })));
        let bad = MINIMAL.replace("\"2/2\"", "\"2/0\"");
        match load(&bad) {
            Err(Error::Schema { location, .. }) => assert_eq!(location, "multiplication[8]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_inconsistency_in_delta() {
        let bad = MINIMAL.replace("\"deltas\": [[]]", "\"deltas\": [[[\"t1\", \"t2\", \"1\"]]]");
        assert!(matches!(load(&bad), Err(Error::DegreeInconsistency(_))));
    }

    #[test]
    fn generator_and_explicit_forms_agree() {
        let m = CeModel::heisenberg();
        let g = AlgebraDescription::generated("h", &m, &[(0, 2, int(1))], &[]);
        let a = g.algebra().unwrap();
        let e = AlgebraDescription::explicit("h", &a);
        let b = load(&e.to_json().unwrap()).unwrap().algebra;
        assert_eq!(a, b);
        let g2 = load(&g.to_json().unwrap()).unwrap();
        assert_eq!(g2.description, g.canonicalize().unwrap());
    }
}
