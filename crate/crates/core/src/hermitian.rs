//! Diagonal invariant Hermitian forms.
//!
//! Invariance `<Xv, w> + <v, sigma(X) w> = 0` with `sigma(E) = F` forces a
//! diagonal form obeying
//! `(nu+m) <v_{m+1}, v_{m+1}> + (conj(nu)-m) <v_{m-1}, v_{m-1}> = 0`
//! on `pi`, and `<v_{m+1}, v_{m+1}> = -sgn(nu^2 - m^2) <v_{m-1}, v_{m-1}>` on `Pi`.
//!
//! At a reducibility point the recursion for `pi` hits `0/x` or `x/0`. Each
//! value is then tracked as `c (nu - nu0)^k`; the limit form keeps the values
//! of least order `k` and sends the rest to zero.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    is_reducibility_point, FamilyKind, FamilySpec, OperatorTriple, Parity, WeightWindow,
};
use crate::scalar::{rat_int, CRat, NuParameter, Rat, Scalar};
use crate::structure::series_report;

/// Which weight was normalized to 1, and the power of `nu - nu0` the raw
/// recursion was multiplied by to reach the limit (0 away from walls).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub weight: i64,
    pub order: i64,
}

/// Values `<v_j, v_j>` of a diagonal form on a weight window.
#[derive(Clone, Debug, PartialEq)]
pub struct FormTable {
    window: WeightWindow,
    values: BTreeMap<i64, Scalar>,
    normalization: Normalization,
}

#[derive(Serialize)]
struct FormRow<'a> {
    weight: i64,
    value: &'a Scalar,
    sign: i8,
}

impl Serialize for FormTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            normalization: Normalization,
            values: Vec<FormRow<'a>>,
        }
        Repr {
            normalization: self.normalization,
            values: self.rows().collect(),
        }
        .serialize(s)
    }
}

impl FormTable {
    pub fn window(&self) -> WeightWindow {
        self.window
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn get(&self, j: i64) -> Option<&Scalar> {
        self.values.get(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.values.iter().map(|(j, v)| (*j, v))
    }

    /// Sign of the real part, 0 for a zero value.
    pub fn sign(&self, j: i64) -> Option<i8> {
        self.values.get(&j).map(scalar_sign)
    }

    fn rows(&self) -> impl Iterator<Item = FormRow<'_>> {
        self.values.iter().map(|(j, v)| FormRow {
            weight: *j,
            value: v,
            sign: scalar_sign(v),
        })
    }

    /// A table with the given values, normalized nowhere in particular.
    pub fn from_values(window: WeightWindow, values: BTreeMap<i64, Scalar>) -> Self {
        let weight = window.parity().base_weight();
        FormTable {
            window,
            values,
            normalization: Normalization { weight, order: 0 },
        }
    }

    /// Writes `weight,value,sign` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["weight", "value", "sign"]).map_err(io)?;
        for row in self.rows() {
            w.write_record([
                row.weight.to_string(),
                row.value.to_string(),
                row.sign.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

fn scalar_sign(v: &Scalar) -> i8 {
    let re = match v {
        Scalar::Exact(r) => r.coeff().re.clone(),
        Scalar::Float(z) => {
            return if z.re > 0.0 {
                1
            } else if z.re < 0.0 {
                -1
            } else {
                0
            }
        }
    };
    if re.is_positive() {
        1
    } else if re.is_negative() {
        -1
    } else {
        0
    }
}

trait Field: Clone {
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn into_scalar(self) -> Scalar;
}

impl Field for CRat {
    fn one() -> Self {
        CRat::one()
    }
    fn is_zero(&self) -> bool {
        CRat::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self * &o.inv().expect("nonzero leading coefficient")
    }
    fn neg(&self) -> Self {
        -self
    }
    fn into_scalar(self) -> Scalar {
        Scalar::from_crat(self)
    }
}

impl Field for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
}

/// Leading term of a linear factor in `nu - nu0`: a vanishing factor has
/// order 1 and unit slope along the real axis.
fn lead<T: Field>(z: T) -> (i64, T) {
    if z.is_zero() {
        (1, T::one())
    } else {
        (0, z)
    }
}

/// Solves the `pi` recursion outward from the base weight and takes the limit.
/// `bar(m) = conj(nu) - m`, `plus(m) = nu + m`.
fn solve_pi<T: Field>(
    window: WeightWindow,
    bar: impl Fn(i64) -> T,
    plus: impl Fn(i64) -> T,
) -> FormTable {
    let base = window.parity().base_weight();
    let mut raw: BTreeMap<i64, (i64, T)> = BTreeMap::new();
    raw.insert(base, (0, T::one()));
    let step = |prev: &(i64, T), num: T, den: T| {
        let (on, cn) = lead(num);
        let (od, cd) = lead(den);
        (prev.0 + on - od, prev.1.mul(&cn.div(&cd)).neg())
    };
    let mut j = base;
    while window.contains(j + 2) {
        let m = j + 1;
        let next = step(&raw[&j], bar(m), plus(m));
        raw.insert(j + 2, next);
        j += 2;
    }
    j = base;
    while window.contains(j - 2) {
        let m = j - 1;
        let next = step(&raw[&j], plus(m), bar(m));
        raw.insert(j - 2, next);
        j -= 2;
    }
    let least = raw.values().map(|(k, _)| *k).min().unwrap_or(0);
    let values = raw
        .into_iter()
        .map(|(j, (k, c))| {
            (
                j,
                if k == least {
                    c.into_scalar()
                } else {
                    Scalar::zero()
                },
            )
        })
        .collect();
    FormTable {
        window,
        values,
        normalization: Normalization {
            weight: base,
            order: -least,
        },
    }
}

fn hermitian_locus(nu: &NuParameter) -> Result<()> {
    match nu {
        NuParameter::Float(z) if z.re != 0.0 && z.im != 0.0 => {
            Err(Error::NotHermitianLocus(nu.to_string()))
        }
        _ => Ok(()),
    }
}

/// The invariant form on `pi(eps, nu)` normalized at the weight in `{0, 1}`;
/// at a reducibility point, the limit form.
pub fn form_on_pi(epsilon: i64, nu: &NuParameter, window: i64) -> Result<FormTable> {
    hermitian_locus(nu)?;
    let window = WeightWindow::new(window, Parity::from_epsilon(epsilon)?)?;
    Ok(match nu.exact() {
        Some(c) => {
            let cbar = c.conj();
            solve_pi(
                window,
                |m| &cbar - &CRat::from_int(m),
                |m| &c + &CRat::from_int(m),
            )
        }
        None => {
            let z = nu.to_complex();
            solve_pi(window, |m| z.conj() - m as f64, |m| z + m as f64)
        }
    })
}

fn sign_of_gap(nu: &NuParameter, m: i64) -> Result<i8> {
    let s = match nu {
        NuParameter::ExactReal(r) => {
            let g = r * r - rat_int(m * m);
            g.signum().to_integer().try_into().unwrap_or(0)
        }
        NuParameter::Float(z) if z.im == 0.0 => {
            let g = z.re * z.re - (m * m) as f64;
            if g > 0.0 {
                1
            } else if g < 0.0 {
                -1
            } else {
                0
            }
        }
        _ => {
            return Err(Error::PreconditionViolated(format!(
                "the sign form needs real nu, got {nu}"
            )))
        }
    };
    if s == 0 {
        return Err(Error::AtReducibilityPoint(nu.to_string()));
    }
    Ok(s)
}

/// The `+-1` invariant form on `Pi(eps, nu)` for real `nu` off the
/// reducibility points.
#[allow(non_snake_case)]
pub fn form_on_Pi(epsilon: i64, nu: &NuParameter, window: i64) -> Result<FormTable> {
    let parity = Parity::from_epsilon(epsilon)?;
    if is_reducibility_point(nu, parity) {
        return Err(Error::AtReducibilityPoint(nu.to_string()));
    }
    let window = WeightWindow::new(window, parity)?;
    let base = parity.base_weight();
    let mut signs: BTreeMap<i64, i8> = BTreeMap::new();
    signs.insert(base, 1);
    let mut j = base;
    while window.contains(j + 2) {
        signs.insert(j + 2, -sign_of_gap(nu, j + 1)? * signs[&j]);
        j += 2;
    }
    j = base;
    while window.contains(j - 2) {
        signs.insert(j - 2, -sign_of_gap(nu, j - 1)? * signs[&j]);
        j -= 2;
    }
    let values = signs
        .into_iter()
        .map(|(j, s)| (j, Scalar::from_crat(CRat::from_int(s as i64))))
        .collect();
    Ok(FormTable {
        window,
        values,
        normalization: Normalization {
            weight: base,
            order: 0,
        },
    })
}

fn vanishes(v: &Result<Scalar>, tol: f64) -> bool {
    match v {
        Ok(Scalar::Exact(r)) => r.is_zero(),
        Ok(Scalar::Float(z)) => z.norm() <= tol,
        Err(_) => false,
    }
}

/// `<Xv, w> + <v, sigma(X) w> = 0` for `X` in `{H, E, F}` on every pair of
/// interior weights. Exact when operators and form are exact.
pub fn verify_invariance(ops: &OperatorTriple, form: &FormTable) -> bool {
    const TOL: f64 = 1e-9;
    let window = ops.window();
    if window != form.window() {
        return false;
    }
    let h = |j: i64| form.get(j).cloned().unwrap_or_else(Scalar::zero);
    for j in window.interior_weights() {
        // sigma(H) = -H
        let hj = ops.h.coeff(j);
        let lhs = hj.mul(&h(j)).sub(&hj.conj().mul(&h(j)));
        if !vanishes(&lhs, TOL) {
            return false;
        }
        if !window.is_interior(j + 2) {
            continue;
        }
        let m = j + 1;
        let (a, b) = (ops.alpha(m), ops.beta(m));
        // <E v_{m-1}, v_{m+1}> + <v_{m-1}, F v_{m+1}>
        let e_side = a.mul(&h(m + 1)).add(&b.conj().mul(&h(m - 1)));
        // <F v_{m+1}, v_{m-1}> + <v_{m+1}, E v_{m-1}>
        let f_side = b.mul(&h(m - 1)).add(&a.conj().mul(&h(m + 1)));
        if !vanishes(&e_side, TOL) || !vanishes(&f_side, TOL) {
            return false;
        }
    }
    true
}

/// Weights where the form vanishes.
pub fn radical_of_form(form: &FormTable) -> BTreeSet<i64> {
    form.iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(j, _)| j)
        .collect()
}

/// Whether a sign table alternates for `|j| < |nu| - 1` and is constant on
/// each side beyond.
pub fn alternates_then_constant(form: &FormTable, nu_abs: &Rat) -> bool {
    let inner = |j: i64| Rat::from_integer((j.abs() + 1).into()) < *nu_abs;
    let signs: Vec<(i64, i8)> = form.iter().map(|(j, v)| (j, scalar_sign(v))).collect();
    signs.windows(2).all(|w| {
        let ((j, s), (k, t)) = (w[0], w[1]);
        if inner(j) && inner(k) {
            s == -t
        } else if !inner(j) && !inner(k) && (j > 0) == (k > 0) {
            s == t
        } else {
            true
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "agree")]
    Agree,
    #[serde(rename = "flip")]
    Flip,
}

/// The sign form of `Pi` just below and just above a reducibility point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSidedLimits {
    pub nu0: i64,
    pub left: FormTable,
    pub right: FormTable,
    pub relation: BTreeMap<i64, Relation>,
}

/// The sign pattern is constant between consecutive integers, so the
/// one-sided limits are the forms at `nu0 -+ 1/4`.
pub fn one_sided_limits(epsilon: i64, nu0: i64, window: i64) -> Result<OneSidedLimits> {
    let parity = Parity::from_epsilon(epsilon)?;
    if !parity.opposite().contains(nu0) {
        return Err(Error::PreconditionViolated(format!(
            "nu0 = {nu0} is not a reducibility point for epsilon = {epsilon}"
        )));
    }
    let at = |d: Rat| form_on_Pi(epsilon, &NuParameter::ExactReal(rat_int(nu0) + d), window);
    let quarter = Rat::new(1.into(), 4.into());
    let left = at(-quarter.clone())?;
    let right = at(quarter)?;
    let relation = left
        .iter()
        .map(|(j, v)| {
            let same = right.get(j) == Some(v);
            (
                j,
                if same {
                    Relation::Agree
                } else {
                    Relation::Flip
                },
            )
        })
        .collect();
    Ok(OneSidedLimits {
        nu0,
        left,
        right,
        relation,
    })
}

/// Whether `form` vanishes on every irreducible submodule of the
/// indecomposable `pi(eps, nu0)`.
pub fn socle_vanishing_check(epsilon: i64, nu0: i64, form: &FormTable) -> Result<bool> {
    let spec = FamilySpec::new(
        FamilyKind::Pi0,
        epsilon,
        NuParameter::int(nu0),
        form.window().bound(),
    )?;
    let report = series_report(&spec)?;
    if !report.indecomposable {
        return Err(Error::PreconditionViolated(format!(
            "pi({epsilon}, {nu0}) is not indecomposable"
        )));
    }
    let vanishes_on_socle = report
        .segments
        .iter()
        .filter(|s| s.is_submodule())
        .all(|s| {
            form.iter()
                .filter(|(j, _)| s.contains(*j))
                .all(|(_, v)| v.is_zero())
        });
    Ok(vanishes_on_socle)
}
