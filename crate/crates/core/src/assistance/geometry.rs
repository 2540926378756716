//! Bloch-sphere description of Charlie's projective measurements.
//!
//! For a Charlie projector `½(I + n·σ)` the unnormalised conditional marginal
//! on the chosen side is `½(ρ + Σ_i n_i W_i)` with
//! `W_i = Tr_{other,C}[(I ⊗ I ⊗ σ_i)|ψ⟩⟨ψ|] = ½(t_i I + y_i·σ)`. Hence the
//! outcome probability is `½(1 + t·n)` and the unnormalised Bloch vector is
//! `½(R + Y n)`, where the columns of `Y` are the `y_i`.

use nalgebra::{Matrix3, Vector3};

use crate::monotones::Cut;
use crate::qcore::{pauli, CMat, CVec, PureState, C64};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct ConditionalGeometry {
    /// Bloch vector of the side marginal.
    pub r: Vector3<f64>,
    /// Bloch vector of Charlie's marginal.
    pub t: Vector3<f64>,
    pub y: Matrix3<f64>,
}

/// The state reordered so that the chosen side is the first party.
pub(crate) fn side_first(psi: &PureState, side: Cut) -> Result<PureState> {
    if !psi.is_three_qubit() {
        return Err(Error::input(format!("expected a three-qubit state, got dims {:?}", psi.dims())));
    }
    match side {
        Cut::A => Ok(psi.clone()),
        Cut::B => psi.swapped(0, 1),
    }
}

/// `Tr_{BC}[|x⟩⟨y|]` for three-qubit vectors with the kept party first.
fn cross_marginal(x: &CVec, y: &CVec) -> CMat {
    CMat::from_fn(2, 2, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..4 {
            acc += x[4 * a + k] * y[4 * b + k].conj();
        }
        acc
    })
}

fn bloch3(h: &CMat) -> Vector3<f64> {
    let off = h[(0, 1)] + h[(1, 0)].conj();
    Vector3::new(off.re, -off.im, (h[(0, 0)] - h[(1, 1)]).re)
}

pub(crate) fn conditional_geometry(psi: &PureState, side: Cut) -> Result<ConditionalGeometry> {
    let s = side_first(psi, side)?;
    let v = s.amplitudes();
    let r = bloch3(&cross_marginal(v, v));
    let mut t = Vector3::zeros();
    let mut y = Matrix3::zeros();
    for i in 0..3 {
        let (_, w) = s.apply_on(2, &pauli(i + 1))?;
        let wi = cross_marginal(&w, v);
        t[i] = (wi[(0, 0)] + wi[(1, 1)]).re;
        y.set_column(i, &bloch3(&wi));
    }
    Ok(ConditionalGeometry { r, t, y })
}

/// Orthonormal Charlie pair `(|n⟩, |−n⟩)` for a unit Bloch direction.
pub(crate) fn basis_from_direction(n: &Vector3<f64>) -> [CVec; 2] {
    let n = n.normalize();
    let (nx, ny, nz) = (n[0], n[1], n[2]);
    let e0 = if nz >= 0.0 {
        let a = ((1.0 + nz) / 2.0).sqrt();
        CVec::from_vec(vec![C64::new(a, 0.0), C64::new(nx, ny) / (2.0 * a)])
    } else {
        let b = ((1.0 - nz) / 2.0).sqrt();
        let mut v = CVec::from_vec(vec![C64::new(nx, -ny) / (2.0 * b), C64::new(b, 0.0)]);
        crate::qcore::canonical_phase(&mut v);
        v
    };
    let e1 = CVec::from_vec(vec![-e0[1].conj(), e0[0].conj()]);
    [e0, e1]
}

/// Bloch direction of a normalised qubit ket.
#[cfg(test)]
fn direction_of(e: &CVec) -> Vector3<f64> {
    let h = e * e.adjoint();
    bloch3(&h)
}

/// Unit vectors spanning the numerical null space of a real 3×3 matrix,
/// smallest singular value first, together with all singular values
/// (ascending).
pub(crate) fn null_directions(m: &Matrix3<f64>) -> (Vec<Vector3<f64>>, [f64; 3]) {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let dirs = idx.iter().map(|&k| v_t.row(k).transpose().into_owned()).collect();
    (dirs, idx.map(|k| svd.singular_values[k]))
}
