//! The two-dimensional model: the group generated by `R+` and an involution
//! `delta`, represented by `pi(nu)(e^t) = diag(e^{t nu}, e^{-t nu})` and
//! `pi(nu)(delta) = [[0,1],[1,0]]`, and its conjugate `Pi(nu) = S pi(nu) S^-1`
//! with `S(nu) = [[1,1],[0,-2 nu]]`. `Pi` extends to `nu = 0`, where the
//! restriction to `R+` becomes a Jordan block.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Exp(f64),
    Delta,
}

pub fn toy_pi(nu: f64, g: Element) -> Mat2 {
    match g {
        Element::Exp(t) => Mat2::new((t * nu).exp(), 0.0, 0.0, (-t * nu).exp()),
        Element::Delta => Mat2::new(0.0, 1.0, 1.0, 0.0),
    }
}

/// `sinh(x)/x`, by series near 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// `Pi(nu)(g)`, defined for every real `nu` including 0.
#[allow(non_snake_case)]
pub fn toy_Pi(nu: f64, g: Element) -> Mat2 {
    match g {
        // (e^{t nu} - e^{-t nu}) / (2 nu) = t sinh(t nu)/(t nu)
        Element::Exp(t) => Mat2::new((t * nu).exp(), t * sinhc(t * nu), 0.0, (-t * nu).exp()),
        Element::Delta => Mat2::new(1.0, 0.0, -2.0 * nu, -1.0),
    }
}

pub fn s_matrix(nu: f64) -> Mat2 {
    Mat2::new(1.0, 1.0, 0.0, -2.0 * nu)
}

/// `X(nu) = diag(nu, -nu)` and `Y(nu) = [[nu, 1], [0, -nu]]`.
pub fn generators(nu: f64) -> (Mat2, Mat2) {
    (Mat2::new(nu, 0.0, 0.0, -nu), Mat2::new(nu, 1.0, 0.0, -nu))
}

fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    (a - b).iter().all(|d| d.abs() <= tol)
}

pub const CONJUGATION_TOL: f64 = 1e-12;
const SAMPLE_TIMES: [f64; 4] = [-2.0, -0.5, 1.0, 3.0];

/// `S X S^-1 = Y`, and `S pi(g) S^-1 = Pi(g)` for `delta` and a few `e^t`,
/// entrywise within `1e-12` relative to the entry size.
pub fn toy_conjugation_check(nu: f64) -> Result<bool> {
    if nu == 0.0 {
        return Err(Error::SingularAtZero);
    }
    let s = s_matrix(nu);
    let s_inv = s.try_inverse().ok_or(Error::SingularAtZero)?;
    let (x, y) = generators(nu);
    let scale = |m: &Mat2| CONJUGATION_TOL * m.amax().max(1.0);
    if !close(&(s * x * s_inv), &y, scale(&y)) {
        return Ok(false);
    }
    let mut elements = vec![Element::Delta];
    elements.extend(SAMPLE_TIMES.iter().map(|&t| Element::Exp(t)));
    Ok(elements.into_iter().all(|g| {
        let target = toy_Pi(nu, g);
        close(&(s * toy_pi(nu, g) * s_inv), &target, scale(&target))
    }))
}

fn rows(m: &Mat2) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub nu: f64,
    pub exp_error: f64,
    pub delta_error: f64,
}

/// `Pi(nu)` along `nu = 2^-k` with its distance to the expected limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyLimit {
    pub t: f64,
    #[serde(serialize_with = "ser_mat")]
    pub exp_limit: Mat2,
    #[serde(serialize_with = "ser_mat")]
    pub delta_limit: Mat2,
    pub table: Vec<ConvergenceRow>,
}

fn ser_mat<S: serde::Serializer>(m: &Mat2, s: S) -> std::result::Result<S::Ok, S::Error> {
    rows(m).serialize(s)
}

pub const LIMIT_STEPS: i32 = 40;

pub fn jordan_block(t: f64) -> Mat2 {
    Mat2::new(1.0, t, 0.0, 1.0)
}

pub fn delta_limit() -> Mat2 {
    Mat2::new(1.0, 0.0, 0.0, -1.0)
}

/// The last term of the sequence is returned as the limit; the table shows
/// the distance of every term to `[[1,t],[0,1]]` and `[[1,0],[0,-1]]`.
#[allow(non_snake_case)]
pub fn toy_Pi_limit(t: f64) -> ToyLimit {
    let dist = |a: &Mat2, b: &Mat2| (a - b).amax();
    let table: Vec<ConvergenceRow> = (1..=LIMIT_STEPS)
        .map(|k| {
            let nu = 0.5f64.powi(k);
            ConvergenceRow {
                nu,
                exp_error: dist(&toy_Pi(nu, Element::Exp(t)), &jordan_block(t)),
                delta_error: dist(&toy_Pi(nu, Element::Delta), &delta_limit()),
            }
        })
        .collect();
    let last = 0.5f64.powi(LIMIT_STEPS);
    ToyLimit {
        t,
        exp_limit: toy_Pi(last, Element::Exp(t)),
        delta_limit: toy_Pi(last, Element::Delta),
        table,
    }
}

/// Serializable snapshot of the four matrices at `(nu, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyMatrices {
    pub nu: f64,
    pub t: f64,
    pub pi_exp: [[f64; 2]; 2],
    pub pi_delta: [[f64; 2]; 2],
    #[serde(rename = "Pi_exp")]
    pub big_pi_exp: [[f64; 2]; 2],
    #[serde(rename = "Pi_delta")]
    pub big_pi_delta: [[f64; 2]; 2],
}

pub fn toy_matrices(nu: f64, t: f64) -> ToyMatrices {
    ToyMatrices {
        nu,
        t,
        pi_exp: rows(&toy_pi(nu, Element::Exp(t))),
        pi_delta: rows(&toy_pi(nu, Element::Delta)),
        big_pi_exp: rows(&toy_Pi(nu, Element::Exp(t))),
        big_pi_delta: rows(&toy_Pi(nu, Element::Delta)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrices() {
        assert_eq!(toy_pi(0.0, Element::Exp(1.7)), Mat2::identity());
        assert_eq!(toy_pi(0.3, Element::Delta), Mat2::new(0.0, 1.0, 1.0, 0.0));
        let m = toy_pi(1.0, Element::Exp(2f64.ln()));
        assert!(close(&m, &Mat2::new(2.0, 0.0, 0.0, 0.5), 1e-15));
    }

    #[test]
    fn conjugation() {
        for nu in [1.0, -0.5, 0.25] {
            assert!(toy_conjugation_check(nu).unwrap());
        }
        assert_eq!(toy_conjugation_check(0.0), Err(Error::SingularAtZero));
    }

    #[test]
    fn limits() {
        for t in [0.0, 1.0, -2.0] {
            let l = toy_Pi_limit(t);
            assert!(close(&l.exp_limit, &jordan_block(t), 1e-8));
            assert!(close(&l.delta_limit, &delta_limit(), 1e-8));
            assert!(l
                .table
                .windows(2)
                .all(|w| w[1].delta_error <= w[0].delta_error));
        }
        assert_eq!(toy_Pi_limit(0.0).exp_limit, Mat2::identity());
    }

    #[test]
    fn limit_is_indecomposable_on_r_plus() {
        // a nontrivial Jordan block is not diagonalizable; pi(0) is diagonal
        let j = toy_Pi(0.0, Element::Exp(1.0));
        assert_eq!(j, jordan_block(1.0));
        assert!(j[(0, 1)] != 0.0 && j[(0, 0)] == j[(1, 1)]);
        assert_eq!(toy_pi(0.0, Element::Exp(1.0)), Mat2::identity());
    }

    proptest! {
        #[test]
        fn group_law(nu in -2.0f64..2.0, s in -2.5f64..2.5, t in -2.5f64..2.5) {
            let tol = 1e-12 * (((s.abs() + t.abs()) * nu.abs()).exp() * (1.0 + s.abs() + t.abs()));
            let lhs = toy_pi(nu, Element::Exp(s)) * toy_pi(nu, Element::Exp(t));
            prop_assert!(close(&lhs, &toy_pi(nu, Element::Exp(s + t)), tol));
            let lhs = toy_Pi(nu, Element::Exp(s)) * toy_Pi(nu, Element::Exp(t));
            prop_assert!(close(&lhs, &toy_Pi(nu, Element::Exp(s + t)), tol));
        }

        #[test]
        fn determinant_and_involution(nu in -2.0f64..2.0, t in -5.0f64..5.0) {
            prop_assert!((toy_pi(nu, Element::Exp(t)).determinant() - 1.0).abs() <= 1e-12);
            prop_assert!((toy_Pi(nu, Element::Exp(t)).determinant() - 1.0).abs() <= 1e-12);
            let d = toy_pi(nu, Element::Delta);
            prop_assert_eq!(d * d, Mat2::identity());
            let d = toy_Pi(nu, Element::Delta);
            prop_assert!(close(&(d * d), &Mat2::identity(), 1e-12));
        }

        #[test]
        fn conjugate_family(nu in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0]) {
            prop_assert!(toy_conjugation_check(nu).unwrap());
        }
    }
}
