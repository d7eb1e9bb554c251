//! Banded `H`, `E`, `F` operators of the principal series `pi(eps, nu)`, its
//! completely reducible deformation `Pi(eps, nu)`, the algebraic family
//! `pi'(eps, nu)` and psi-gauged variants, truncated to a finite weight window.
//!
//! Entries are indexed by the source weight: an entry `c` at weight `j` of an
//! operator with shift `s` means `X v_j = c v_{j+s}`. Raising and lowering
//! coefficients are parametrized by `m` in the opposite parity class, with
//! `E v_{m-1} = alpha_m v_{m+1}` and `F v_{m+1} = beta_m v_{m-1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::deform::PsiHandle;
use crate::error::{Error, Result};
use crate::scalar::{rat, rat_int, CRat, NuParameter, RadicalScalar, Scalar};

/// `eps = +1` selects even weights, `eps = -1` odd weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_epsilon(eps: i64) -> Result<Self> {
        match eps {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            _ => Err(Error::Parse(format!("epsilon must be 1 or -1, got {eps}"))),
        }
    }

    pub fn epsilon(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// `(-1)^j == eps`.
    pub fn contains(self, j: i64) -> bool {
        (j.rem_euclid(2) == 0) == (self == Parity::Even)
    }

    /// The unique weight in `{0, 1}` of this parity.
    pub fn base_weight(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Reducibility points: is `nu` an integer of the opposite parity?
pub fn is_reducibility_point(nu: &NuParameter, parity: Parity) -> bool {
    nu.as_integer()
        .is_some_and(|n| parity.opposite().contains(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightWindow {
    bound: i64,
    parity: Parity,
}

impl WeightWindow {
    pub const MIN_BOUND: i64 = 6;
    /// Distance from the edge inside which every relation is checkable.
    pub const MARGIN: i64 = 4;

    pub fn new(bound: i64, parity: Parity) -> Result<Self> {
        if bound < Self::MIN_BOUND {
            return Err(Error::WindowTooSmall {
                bound,
                needed: Self::MIN_BOUND,
            });
        }
        Ok(Self { bound, parity })
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn contains(&self, j: i64) -> bool {
        j.abs() <= self.bound && self.parity.contains(j)
    }

    pub fn is_interior(&self, j: i64) -> bool {
        self.contains(j) && j.abs() <= self.bound - Self::MARGIN
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        let start = if self.parity.contains(-self.bound) {
            -self.bound
        } else {
            -self.bound + 1
        };
        (start..=self.bound).step_by(2)
    }

    pub fn interior_weights(&self) -> impl Iterator<Item = i64> + '_ {
        self.weights().filter(move |&j| self.is_interior(j))
    }

    /// Coefficient indices `m` (opposite parity) with `m - 1` and `m + 1` in the window.
    pub fn coefficient_indices(&self) -> impl Iterator<Item = i64> + '_ {
        let lo = self.weights().next().unwrap_or(0) + 1;
        (lo..self.bound).step_by(2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightOperator {
    window: WeightWindow,
    shift: i64,
    entries: BTreeMap<i64, Scalar>,
}

impl WeightOperator {
    pub fn new(window: WeightWindow, shift: i64) -> Self {
        debug_assert!(matches!(shift, -2 | 0 | 2));
        Self {
            window,
            shift,
            entries: BTreeMap::new(),
        }
    }

    /// Stores `X v_j = value v_{j+shift}`; dropped when either end leaves the window.
    pub fn set(&mut self, j: i64, value: Scalar) {
        if self.window.contains(j) && self.window.contains(j + self.shift) {
            self.entries.insert(j, value);
        }
    }

    /// Coefficient of `v_{j+shift}` in `X v_j` (zero when not stored).
    pub fn coeff(&self, j: i64) -> Scalar {
        self.entries.get(&j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn entry(&self, j: i64) -> Option<&Scalar> {
        self.entries.get(&j)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.entries.iter().map(|(j, v)| (*j, v))
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = (i64, &mut Scalar)> {
        self.entries.iter_mut().map(|(j, v)| (*j, v))
    }

    pub fn window(&self) -> WeightWindow {
        self.window
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Scalar::is_exact)
    }
}

impl Serialize for WeightOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct EntryRepr<'a> {
            src: i64,
            dst: i64,
            val: &'a Scalar,
        }
        s.collect_seq(self.entries.iter().map(|(j, v)| EntryRepr {
            src: *j,
            dst: *j + self.shift,
            val: v,
        }))
    }
}

/// The three operators of one module on one window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorTriple {
    pub h: WeightOperator,
    pub e: WeightOperator,
    pub f: WeightOperator,
}

impl OperatorTriple {
    pub fn window(&self) -> WeightWindow {
        self.h.window()
    }

    pub fn is_exact(&self) -> bool {
        self.h.is_exact() && self.e.is_exact() && self.f.is_exact()
    }

    /// `alpha_m`, the `E` coefficient at `m - 1`.
    pub fn alpha(&self, m: i64) -> Scalar {
        self.e.coeff(m - 1)
    }

    /// `beta_m`, the `F` coefficient at `m + 1`.
    pub fn beta(&self, m: i64) -> Scalar {
        self.f.coeff(m + 1)
    }

    /// Assembles a triple from coefficient functions `alpha_m`, `beta_m`.
    pub fn from_coefficients(
        window: WeightWindow,
        mut alpha: impl FnMut(i64) -> Result<Scalar>,
        mut beta: impl FnMut(i64) -> Result<Scalar>,
    ) -> Result<Self> {
        let mut h = WeightOperator::new(window, 0);
        let mut e = WeightOperator::new(window, 2);
        let mut f = WeightOperator::new(window, -2);
        for j in window.weights() {
            h.set(j, Scalar::Exact(RadicalScalar::from_int(j)));
        }
        for m in window.coefficient_indices() {
            e.set(m - 1, alpha(m)?);
            f.set(m + 1, beta(m)?);
        }
        Ok(Self { h, e, f })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    /// The principal series `pi`.
    Pi0,
    /// The completely reducible deformation `Pi`.
    PiDeformed,
    /// The algebraic family `pi'`.
    PiPrime,
    PsiCustom,
}

impl FamilyKind {
    pub const NAMED: [FamilyKind; 3] =
        [FamilyKind::Pi0, FamilyKind::PiDeformed, FamilyKind::PiPrime];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Pi0 => "pi",
            FamilyKind::PiDeformed => "Pi",
            FamilyKind::PiPrime => "piPrime",
            FamilyKind::PsiCustom => "psiCustom",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(FamilyKind::Pi0),
            "Pi" => Ok(FamilyKind::PiDeformed),
            "piPrime" | "pi'" => Ok(FamilyKind::PiPrime),
            "psiCustom" => Ok(FamilyKind::PsiCustom),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub parity: Parity,
    pub nu: NuParameter,
    pub window: i64,
    pub psi: Option<PsiHandle>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, epsilon: i64, nu: NuParameter, window: i64) -> Result<Self> {
        Ok(Self {
            kind,
            parity: Parity::from_epsilon(epsilon)?,
            nu,
            window,
            psi: None,
        })
    }

    pub fn psi_custom(epsilon: i64, nu: NuParameter, window: i64, psi: PsiHandle) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::PsiCustom,
            parity: Parity::from_epsilon(epsilon)?,
            nu,
            window,
            psi: Some(psi),
        })
    }

    pub fn epsilon(&self) -> i64 {
        self.parity.epsilon()
    }

    pub fn weight_window(&self) -> Result<WeightWindow> {
        WeightWindow::new(self.window, self.parity)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.psi) {
            (FamilyKind::PsiCustom, None) => Err(Error::MissingPsi),
            (FamilyKind::PsiCustom, Some(_)) | (_, None) => Ok(()),
            (_, Some(_)) => Err(Error::UnexpectedPsi),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FamilySpecRepr {
    kind: String,
    epsilon: i64,
    nu: NuParameter,
    window: i64,
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilySpecRepr {
            kind: self.kind.as_str().to_string(),
            epsilon: self.epsilon(),
            nu: self.nu.clone(),
            window: self.window,
        }
        .serialize(s)
    }
}

/// A deserialized `psiCustom` spec carries no handle; attach one before building.
impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FamilySpecRepr::deserialize(d)?;
        let kind = repr.kind.parse().map_err(D::Error::custom)?;
        FamilySpec::new(kind, repr.epsilon, repr.nu, repr.window).map_err(D::Error::custom)
    }
}

fn half(s: Scalar) -> Scalar {
    s.scale_rat(&rat(1, 2))
}

/// `f_m(nu) = |nu^2 - m^2|^(1/2) (nu + m)/|nu + m|`, and 0 at `nu = -m`.
///
/// Exact on the real axis (a signed radical) and on the imaginary axis, where
/// the moduli cancel and the value is `nu + m`.
pub fn f_coefficient(m: i64, nu: &NuParameter) -> Scalar {
    match nu {
        NuParameter::ExactReal(r) => {
            let shifted = r + rat_int(m);
            if shifted.is_zero() {
                return Scalar::zero();
            }
            let gap = (r * r - rat_int(m * m)).abs();
            let root = RadicalScalar::sqrt(&gap).expect("non-negative radicand");
            let signed = if shifted.is_negative() {
                root.neg()
            } else {
                root
            };
            Scalar::Exact(signed)
        }
        NuParameter::ExactImaginary(t) => Scalar::from_crat(CRat::new(rat_int(m), t.clone())),
        NuParameter::Float(z) => {
            let shifted = z + m as f64;
            if shifted.norm() == 0.0 {
                return Scalar::Float(Complex64::new(0.0, 0.0));
            }
            let modulus = (z * z - (m * m) as f64).norm().sqrt();
            Scalar::Float(shifted / shifted.norm() * modulus)
        }
    }
}

fn expect_kind(spec: &FamilySpec, kind: FamilyKind) -> Result<WeightWindow> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::PreconditionViolated(format!(
            "expected a {kind} spec, got {}",
            spec.kind
        )));
    }
    spec.weight_window()
}

/// `E v_{m-1} = (nu+m)/2 v_{m+1}`, `F v_{m+1} = (nu-m)/2 v_{m-1}`.
pub fn build_pi(spec: &FamilySpec) -> Result<OperatorTriple> {
    let window = expect_kind(spec, FamilyKind::Pi0)?;
    let nu = &spec.nu;
    OperatorTriple::from_coefficients(
        window,
        |m| Ok(half(nu.shifted(m))),
        |m| Ok(half(nu.shifted(-m))),
    )
}

/// `E v_{m-1} = f_m(nu)/2 v_{m+1}`, `F v_{m+1} = f_{-m}(nu)/2 v_{m-1}`.
#[allow(non_snake_case)]
pub fn build_Pi(spec: &FamilySpec) -> Result<OperatorTriple> {
    let window = expect_kind(spec, FamilyKind::PiDeformed)?;
    let nu = &spec.nu;
    OperatorTriple::from_coefficients(
        window,
        |m| Ok(half(f_coefficient(m, nu))),
        |m| Ok(half(f_coefficient(-m, nu))),
    )
}

/// `E v_{m-1} = (nu-|m|)/2 v_{m+1}`, `F v_{m+1} = (nu+|m|)/2 v_{m-1}`.
pub fn build_pi_prime(spec: &FamilySpec) -> Result<OperatorTriple> {
    let window = expect_kind(spec, FamilyKind::PiPrime)?;
    let nu = &spec.nu;
    OperatorTriple::from_coefficients(
        window,
        |m| Ok(half(nu.shifted(-m.abs()))),
        |m| Ok(half(nu.shifted(m.abs()))),
    )
}

/// `E v_{m-1} = (nu+m)/(2 psi_m) v_{m+1}`, `F v_{m+1} = (nu-m) psi_m / 2 v_{m-1}`.
pub fn build_psi_custom(spec: &FamilySpec) -> Result<OperatorTriple> {
    let window = expect_kind(spec, FamilyKind::PsiCustom)?;
    let psi = spec.psi.as_ref().ok_or(Error::MissingPsi)?;
    let nu = &spec.nu;
    let mut cache = BTreeMap::new();
    let mut psi_at = |m: i64| -> Result<Scalar> {
        if let Some(v) = cache.get(&m) {
            return Ok(Scalar::clone(v));
        }
        let v = psi.evaluate(m, nu)?;
        cache.insert(m, v.clone());
        Ok(v)
    };
    let mut alphas = BTreeMap::new();
    let mut betas = BTreeMap::new();
    for m in window.coefficient_indices() {
        let p = psi_at(m)?;
        let inv = p.inv().ok_or_else(|| Error::PsiUndefined {
            m,
            nu: nu.to_string(),
        })?;
        alphas.insert(m, half(nu.shifted(m).mul(&inv)));
        betas.insert(m, half(nu.shifted(-m).mul(&p)));
    }
    OperatorTriple::from_coefficients(
        window,
        |m| Ok(alphas[&m].clone()),
        |m| Ok(betas[&m].clone()),
    )
}

/// Dispatches on `spec.kind`.
pub fn build(spec: &FamilySpec) -> Result<OperatorTriple> {
    match spec.kind {
        FamilyKind::Pi0 => build_pi(spec),
        FamilyKind::PiDeformed => build_Pi(spec),
        FamilyKind::PiPrime => build_pi_prime(spec),
        FamilyKind::PsiCustom => build_psi_custom(spec),
    }
}
