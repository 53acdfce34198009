//! Seeded perturbations of explicit descriptions, used to build negative
//! instances.
//!
//! A perturbation negates one entry of the multiplication table or of a Δ_k
//! matrix, drops the trace, or shifts one entry of a retract's homotopy.
//! Entries are tried in a seeded order and the
//! first one accepted by the caller's predicate is kept, so a negative
//! instance can be required to pass every gate before the intended one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gla::scalar;
use crate::gla::GradedMap;
use crate::models::description::{AlgebraDescription, InnerProductSpec};
use crate::retract::Retract;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Multiplication,
    Delta(usize),
}

/// Explicit form of `d`, keeping everything but the generator block.
pub fn to_explicit(d: &AlgebraDescription) -> Result<AlgebraDescription> {
    if d.generator.is_none() {
        return Ok(d.clone());
    }
    let mut e = AlgebraDescription::explicit(d.name.clone(), &d.algebra()?);
    e.note = d.note.clone();
    e.truncation = d.truncation;
    e.expect = d.expect.clone();
    e.inner_product = match &d.inner_product {
        Some(InnerProductSpec::Star) => {
            return Err(Error::Schema {
                location: "inner_product".into(),
                message: "`star` cannot be carried to an explicit description".into(),
            })
        }
        other => other.clone(),
    };
    Ok(e)
}

fn negate(x: &mut String) -> Result<()> {
    *x = scalar::format(&-scalar::parse(x)?);
    Ok(())
}

fn entry_count(d: &AlgebraDescription, t: Target) -> usize {
    match t {
        Target::Multiplication => d.multiplication.as_ref().map_or(0, Vec::len),
        Target::Delta(k) => d
            .deltas
            .as_ref()
            .and_then(|ds| ds.get(k))
            .map_or(0, Vec::len),
    }
}

/// Negates entry `n` of `target`.
pub fn flip(d: &AlgebraDescription, t: Target, n: usize) -> Result<AlgebraDescription> {
    let mut e = to_explicit(d)?;
    let slot = match t {
        Target::Multiplication => e.multiplication.as_mut().and_then(|m| m.get_mut(n)).map(|x| &mut x.3),
        Target::Delta(k) => e
            .deltas
            .as_mut()
            .and_then(|ds| ds.get_mut(k))
            .and_then(|m| m.get_mut(n))
            .map(|x| &mut x.2),
    };
    let slot = slot.ok_or_else(|| Error::DimensionMismatch(format!("no entry {n} in {t:?}")))?;
    negate(slot)?;
    Ok(e)
}

/// Tries the entries of `target` in the order given by `seed` and returns
/// the first flip accepted by `accept`, with the index of the flipped entry.
pub fn seeded_flip(
    d: &AlgebraDescription,
    t: Target,
    seed: u64,
    mut accept: impl FnMut(&AlgebraDescription) -> bool,
) -> Result<(AlgebraDescription, usize)> {
    let base = to_explicit(d)?;
    let mut order: Vec<usize> = (0..entry_count(&base, t)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for n in order {
        let cand = flip(&base, t, n)?;
        if accept(&cand) {
            return Ok((cand, n));
        }
    }
    Err(Error::Verification(format!(
        "no single flip of {t:?} in `{}` is accepted",
        d.name
    )))
}

/// Adds 1 to one degree-compatible entry of h, trying positions in seeded
/// order until `accept` takes the perturbed retract.
pub fn seeded_homotopy_shift(
    r: &Retract,
    seed: u64,
    mut accept: impl FnMut(&Retract) -> bool,
) -> Result<(Retract, (usize, usize))> {
    let sp = r.h.source().clone();
    let mut slots: Vec<(usize, usize)> = (0..sp.dim())
        .flat_map(|c| (0..sp.dim()).map(move |row| (row, c)))
        .filter(|&(row, c)| sp.degree(row) == sp.degree(c) - 1)
        .collect();
    slots.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for (row, c) in slots {
        let mut m = r.h.matrix().clone();
        m.set(row, c, m.get(row, c) + scalar::one());
        let cand = Retract {
            h: GradedMap::new(sp.clone(), sp.clone(), -1, m)?,
            ..r.clone()
        };
        if accept(&cand) {
            return Ok((cand, (row, c)));
        }
    }
    Err(Error::Verification("no shift of h is accepted".into()))
}

/// The description with its trace removed.
pub fn drop_trace(d: &AlgebraDescription) -> Result<AlgebraDescription> {
    let mut e = to_explicit(d)?;
    e.trace = Some(Vec::new());
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv::validate_algebra;
    use crate::models::ce::CeModel;

    #[test]
    fn flip_is_an_involution() {
        let d = AlgebraDescription::generated("h3", &CeModel::heisenberg(), &[], &[]);
        let once = flip(&d, Target::Multiplication, 3).unwrap();
        let twice = flip(&once, Target::Multiplication, 3).unwrap();
        assert_eq!(twice, to_explicit(&d).unwrap());
        assert_ne!(once, twice);
    }

    #[test]
    fn seeded_flip_is_deterministic() {
        let d = AlgebraDescription::generated("t2", &CeModel::abelian(2), &[], &[]);
        let broken = |c: &AlgebraDescription| !validate_algebra(&c.algebra().unwrap()).passed();
        let (a, i) = seeded_flip(&d, Target::Multiplication, 7, broken).unwrap();
        let (b, j) = seeded_flip(&d, Target::Multiplication, 7, broken).unwrap();
        assert_eq!((a, i), (b, j));
    }

    #[test]
    fn shifted_homotopy_breaks_the_retract() {
        use crate::retract::{build_retract, verify_retract, InnerProduct};
        let a = CeModel::heisenberg().cdga().unwrap();
        let (_, r) = build_retract(&a, &InnerProduct::orthonormal(a.space().clone())).unwrap();
        assert!(verify_retract(&a, &r).unwrap().passed());
        let (bad, _) = seeded_homotopy_shift(&r, 5, |c| !verify_retract(&a, c).unwrap().passed()).unwrap();
        assert_ne!(bad, r);
    }
}
