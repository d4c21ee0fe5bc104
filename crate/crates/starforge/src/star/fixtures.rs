use num_traits::Zero;

use super::StarPresentation;
use crate::error::{Error, Result};
use crate::kernel::{Scalar, TruncSeries};
use crate::model::{Kind, Layout, Model};

/// The 2-star with q = (p, p) whose algebra is the diagonal mod t^p.
pub fn congruence_pair(p: usize) -> Result<StarPresentation> {
    if p == 0 {
        return Err(Error::Usage("p must be positive".into()));
    }
    let layout = Layout::new(1, vec![p, p])?;
    let vectors = (0..p).map(|k| layout.pi_pow(k)).collect();
    Ok(StarPresentation::from_model(Model::new(
        Kind::Star,
        layout,
        vectors,
    )?))
}

/// Functions on the n plane lines y = c_i t, restricted to each line.
pub fn lines(c: &[Scalar]) -> Result<StarPresentation> {
    let phis: Vec<TruncSeries> = c
        .iter()
        .map(|ci| TruncSeries::new(vec![Scalar::zero(), ci.clone()]).expect("nonempty"))
        .collect();
    curves(&phis)
}

/// Functions on the plane curves y = φ_i(t), restricted to each curve. The
/// φ_i are read as polynomials with φ_i(0) = 0; the levels are
/// q_i = Σ_j val(φ_i − φ_j), so the curves must be pairwise distinct.
pub fn curves(phis: &[TruncSeries]) -> Result<StarPresentation> {
    let n = phis.len();
    if n < 2 {
        return Err(Error::Usage("a star needs at least two components".into()));
    }
    if let Some(i) = phis.iter().position(|f| !f.coeff(0).is_zero()) {
        return Err(Error::DegenerateInput(format!(
            "curve {} does not pass through P",
            i + 1
        )));
    }
    let width = phis.iter().map(TruncSeries::trunc).max().unwrap_or(1);
    let polys: Vec<TruncSeries> = phis.iter().map(|f| f.retrunc(width)).collect();
    let mut q = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = polys[i].sub(&polys[j]).expect("same truncation");
            match d.valuation() {
                Some(v) => q[i] += v,
                None => {
                    return Err(Error::DegenerateInput(format!(
                        "curves {} and {} coincide",
                        i + 1,
                        j + 1
                    )))
                }
            }
        }
    }
    let layout = Layout::new(1, q.clone())?;
    let qmax = *q.iter().max().expect("n >= 2");
    // t^a y^b restricts to t^a φ_i^b, of valuation ≥ a + b.
    let mut vectors = Vec::new();
    for total in 0..qmax {
        for b in 0..=total {
            let a = total - b;
            let comps: Vec<TruncSeries> = (0..n)
                .map(|i| {
                    let phi = polys[i].retrunc(q[i]);
                    phi.pow(b).shift(a)
                })
                .collect();
            vectors.push(layout.from_series(&comps)?);
        }
    }
    Ok(StarPresentation::from_model(Model::new(
        Kind::Star,
        layout,
        vectors,
    )?))
}

/// All tuples agreeing at P, at levels q_i = n − 1: the coordinate axes of
/// n-space, which is a valid star but not an oblate one for n ≥ 3.
pub fn initial(n: usize) -> Result<StarPresentation> {
    if n < 2 {
        return Err(Error::Usage("a star needs at least two components".into()));
    }
    let layout = Layout::new(1, vec![n - 1; n])?;
    let mut vectors = vec![layout.one()];
    for i in 0..n {
        for k in 1..n - 1 {
            vectors.push(layout.component_monomial(i, 0, k));
        }
    }
    Ok(StarPresentation::from_model(Model::new(
        Kind::Star,
        layout,
        vectors,
    )?))
}
