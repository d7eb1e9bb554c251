//! Deforming `pi(eps, nu)` by diagonal rescaling.
//!
//! A choice of nonvanishing `phi_j(nu)` defines the gauge
//! `psi_m = phi_{m+1} / phi_{m-1}`. Rescaling the basis by `phi` turns the
//! raising coefficient `(nu+m)/2` into `(nu+m)/(2 psi_m)` and the lowering
//! coefficient `(nu-m)/2` into `(nu-m) psi_m / 2`. Whether the rescaled family
//! extends across a reducibility point is decided by the limits of
//! `(nu+m)/psi_m` and `(nu-m) psi_m` there, which this module probes
//! numerically.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    build, is_reducibility_point, FamilyKind, FamilySpec, OperatorTriple, WeightOperator,
    WeightWindow,
};
use crate::scalar::{rat, CRat, NuParameter, RadicalScalar, Scalar};

type PsiEval = dyn Fn(i64, &NuParameter) -> Result<Scalar> + Send + Sync;
type PsiDomain = dyn Fn(i64, &NuParameter) -> bool + Send + Sync;

/// A gauge function `psi_m(nu)` with an explicit domain.
#[derive(Clone)]
pub struct PsiHandle {
    eval: Arc<PsiEval>,
    domain: Arc<PsiDomain>,
    description: String,
}

impl fmt::Debug for PsiHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiHandle")
            .field("description", &self.description)
            .finish()
    }
}

impl PsiHandle {
    pub fn new(
        description: impl Into<String>,
        domain: impl Fn(i64, &NuParameter) -> bool + Send + Sync + 'static,
        eval: impl Fn(i64, &NuParameter) -> Result<Scalar> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            domain: Arc::new(domain),
            description: description.into(),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn in_domain(&self, m: i64, nu: &NuParameter) -> bool {
        (self.domain)(m, nu)
    }

    /// `psi_m(nu)`; zero or out-of-domain values are `PsiUndefined`.
    pub fn evaluate(&self, m: i64, nu: &NuParameter) -> Result<Scalar> {
        let undefined = || Error::PsiUndefined {
            m,
            nu: nu.to_string(),
        };
        if !self.in_domain(m, nu) {
            return Err(undefined());
        }
        let v = (self.eval)(m, nu)?;
        let bad = match &v {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(z) => z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite(),
        };
        if bad {
            Err(undefined())
        } else {
            Ok(v)
        }
    }

    /// `psi == 1`: leaves `pi` unchanged.
    pub fn trivial() -> Self {
        Self::new("1", |_, _| true, |_, _| Ok(Scalar::one()))
    }

    /// `psi_m(nu) = |nu+m|^(1/2) / |nu-m|^(1/2)`, defined for `nu != +-m`.
    pub fn canonical() -> Self {
        Self::new(
            "|nu+m|^(1/2)/|nu-m|^(1/2)",
            |m, nu| match nu.exact() {
                Some(c) => {
                    let k = CRat::from_int(m);
                    !(&c + &k).is_zero() && !(&c - &k).is_zero()
                }
                None => {
                    let z = nu.to_complex();
                    (z + m as f64).norm() > 0.0 && (z - m as f64).norm() > 0.0
                }
            },
            |m, nu| match nu.exact() {
                Some(c) => {
                    let k = CRat::from_int(m);
                    RadicalScalar::sqrt_modulus_ratio(&(&c + &k), &(&c - &k)).map(Scalar::Exact)
                }
                None => {
                    let z = nu.to_complex();
                    let r = (z + m as f64).norm() / (z - m as f64).norm();
                    Ok(Scalar::Float(Complex64::new(r.sqrt(), 0.0)))
                }
            },
        )
    }

    /// `psi_m = phi_{m+1}/phi_{m-1}` with `phi` from the recursion, at any `nu`.
    pub fn from_phi_recursion() -> Self {
        Self::new(
            "phi_{m+1}/phi_{m-1} (recursive phi)",
            |m, nu| {
                let n = nu.as_integer();
                // phi_{m+-1} need nu != m, m-2, ..., i.e. nu off integers of m's parity
                // up to |m|; the recursion itself needs nothing more.
                !n.is_some_and(|n| (n - m).rem_euclid(2) == 0 && n.abs() <= m.abs())
            },
            |m, nu| {
                let up = phi_value(m + 1, nu)?;
                let down = phi_value(m - 1, nu)?;
                let inv = down.inv().ok_or_else(|| Error::PsiUndefined {
                    m,
                    nu: nu.to_string(),
                })?;
                Ok(up.mul(&inv))
            },
        )
    }
}

/// `sqrt(|nu + k| / |nu - k|)`, exact when `nu` is exact.
fn modulus_ratio_root(nu: &NuParameter, k: i64) -> Result<Scalar> {
    match nu.exact() {
        Some(c) => {
            let kk = CRat::from_int(k);
            RadicalScalar::sqrt_modulus_ratio(&(&c + &kk), &(&c - &kk)).map(Scalar::Exact)
        }
        None => {
            let z = nu.to_complex();
            let den = (z - k as f64).norm();
            if den == 0.0 {
                return Err(Error::AtReducibilityPoint(nu.to_string()));
            }
            Ok(Scalar::Float(Complex64::new(
                ((z + k as f64).norm() / den).sqrt(),
                0.0,
            )))
        }
    }
}

/// `phi_n(nu)`: 1 for `|n| <= 1`, `phi_n = sqrt(|nu+n-1|/|nu-n+1|) phi_{n-2}` for
/// `n > 1`, and `phi_{-n} = phi_n`.
pub fn phi_value(n: i64, nu: &NuParameter) -> Result<Scalar> {
    let n = n.abs();
    let mut acc = Scalar::one();
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        let step = modulus_ratio_root(nu, k - 1)
            .map_err(|_| Error::AtReducibilityPoint(nu.to_string()))?;
        acc = acc.mul(&step);
        k += 2;
    }
    Ok(acc)
}

/// The diagonal `phi_j(nu)` for every weight of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiTable {
    nu: NuParameter,
    window: WeightWindow,
    values: BTreeMap<i64, Scalar>,
}

impl PhiTable {
    pub fn nu(&self) -> &NuParameter {
        &self.nu
    }

    pub fn window(&self) -> WeightWindow {
        self.window
    }

    pub fn get(&self, j: i64) -> Option<&Scalar> {
        self.values.get(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.values.iter().map(|(j, v)| (*j, v))
    }

    /// A table of ones (the identity rescaling).
    pub fn identity(nu: NuParameter, window: WeightWindow) -> Self {
        let values = window.weights().map(|j| (j, Scalar::one())).collect();
        Self { nu, window, values }
    }
}

pub fn phi_table(nu: &NuParameter, window: WeightWindow) -> Result<PhiTable> {
    if is_reducibility_point(nu, window.parity()) {
        return Err(Error::AtReducibilityPoint(nu.to_string()));
    }
    let mut positive: BTreeMap<i64, Scalar> = BTreeMap::new();
    let base = window.parity().base_weight();
    positive.insert(base, Scalar::one());
    let mut n = base + 2;
    while n <= window.bound() {
        let prev = positive[&(n - 2)].clone();
        positive.insert(n, prev.mul(&modulus_ratio_root(nu, n - 1)?));
        n += 2;
    }
    let values = window
        .weights()
        .map(|j| (j, positive[&j.abs()].clone()))
        .collect();
    Ok(PhiTable {
        nu: nu.clone(),
        window,
        values,
    })
}

/// `psi_m = phi_{m+1}/phi_{m-1}`, defined at the table's own `nu` only.
pub fn psi_from_phi(phi: &PhiTable) -> PsiHandle {
    let table = Arc::new(phi.clone());
    let domain_table = Arc::clone(&table);
    PsiHandle::new(
        format!("phi_{{m+1}}/phi_{{m-1}} at nu = {}", phi.nu),
        move |m, nu| {
            *nu == domain_table.nu
                && domain_table.get(m + 1).is_some()
                && domain_table.get(m - 1).is_some()
        },
        move |m, nu| {
            let up = table.get(m + 1).expect("domain checked");
            let down = table.get(m - 1).expect("domain checked");
            let inv = down.inv().ok_or_else(|| Error::PsiUndefined {
                m,
                nu: nu.to_string(),
            })?;
            Ok(up.mul(&inv))
        },
    )
}

/// Rescales the basis by `phi`: `X'_{k,j} = X_{k,j} phi_j / phi_k`.
///
/// With `w_j = phi_j v_j` this is the matrix of the same operator in the basis
/// `w`, so `E` picks up `1/psi_m` and `F` picks up `psi_m`.
pub fn conjugate_by_s(ops: &OperatorTriple, phi: &PhiTable) -> Result<OperatorTriple> {
    if ops.window() != phi.window {
        return Err(Error::PreconditionViolated(
            "phi table and operators live on different windows".into(),
        ));
    }
    let rescale = |op: &WeightOperator| -> Result<WeightOperator> {
        let mut out = WeightOperator::new(op.window(), op.shift());
        for (j, v) in op.entries() {
            let src = &phi.values[&j];
            let dst = &phi.values[&(j + op.shift())];
            let inv = dst
                .inv()
                .ok_or_else(|| Error::AtReducibilityPoint(phi.nu.to_string()))?;
            out.set(j, v.mul(src).mul(&inv));
        }
        Ok(out)
    };
    Ok(OperatorTriple {
        h: rescale(&ops.h)?,
        e: rescale(&ops.e)?,
        f: rescale(&ops.f)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Above,
    Below,
    Imaginary,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Above, Direction::Below, Direction::Imaginary];

    fn offset(self, delta: f64) -> Complex64 {
        match self {
            Direction::Above => Complex64::new(delta, 0.0),
            Direction::Below => Complex64::new(-delta, 0.0),
            Direction::Imaginary => Complex64::new(0.0, delta),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Above => "+",
            Direction::Below => "-",
            Direction::Imaginary => "i",
        }
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

/// Dyadic approach `nu_k = nu0 + delta0 * 2^-k * direction`, `k = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitProbe {
    pub nu0: Complex64,
    pub direction: Direction,
    pub steps: u32,
    pub delta0: f64,
    pub tol: f64,
}

impl LimitProbe {
    pub const DEFAULT_DELTA0: f64 = 0.125;
    pub const DEFAULT_STEPS: u32 = 20;
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(nu0: f64, direction: Direction) -> Self {
        Self {
            nu0: Complex64::new(nu0, 0.0),
            direction,
            steps: Self::DEFAULT_STEPS,
            delta0: Self::DEFAULT_DELTA0,
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn offsets(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.delta0 * 0.5f64.powi(k as i32))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.offsets()
            .map(move |d| self.nu0 + self.direction.offset(d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequenceLimit {
    pub exists: bool,
    pub value: [f64; 2],
    /// `log2` of the ratio of successive differences; `None` once they vanish.
    pub rate: Option<f64>,
}

fn aitken(s0: Complex64, s1: Complex64, s2: Complex64) -> Complex64 {
    let d1 = s2 - s1;
    let den = d1 - (s1 - s0);
    if den.norm() <= f64::EPSILON * (s0.norm() + s1.norm() + s2.norm()) || den.norm() == 0.0 {
        s2
    } else {
        s2 - d1 * d1 / den
    }
}

/// Cauchy test on the Aitken-accelerated dyadic sequence of `f` towards `nu0`.
///
/// Existence needs contracting differences in the tail and two successive
/// accelerated iterates within `tol` (relative above magnitude 1).
pub fn probe_sequence(
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
    probe: &LimitProbe,
) -> Result<SequenceLimit> {
    let positive = |x: f64| x > 0.0 && !x.is_nan();
    if probe.steps < 4 || !positive(probe.tol) || !positive(probe.delta0) {
        return Err(Error::PreconditionViolated(
            "a limit probe needs at least 4 steps and positive delta0 and tol".into(),
        ));
    }
    let samples: Vec<Complex64> = probe.points().map(&mut f).collect::<Result<_>>()?;
    let finite = samples.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let diffs: Vec<f64> = samples.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let n = diffs.len();
    let contracting = diffs[n - 4..].windows(2).all(|w| w[1] <= w[0]);
    let rate = (diffs[n - 1] > 0.0).then(|| (diffs[n - 2] / diffs[n - 1]).log2());
    let accel: Vec<Complex64> = samples
        .windows(3)
        .map(|w| aitken(w[0], w[1], w[2]))
        .collect();
    let last = accel[accel.len() - 1];
    let prev = accel[accel.len() - 2];
    let cauchy = (last - prev).norm() <= probe.tol * last.norm().max(1.0);
    Ok(SequenceLimit {
        exists: finite && contracting && cauchy,
        value: [last.re, last.im],
        rate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitExpression {
    /// `(nu + m) / psi_m(nu)`, the raising side.
    RaisingOverPsi,
    /// `(nu - m) psi_m(nu)`, the lowering side.
    LoweringTimesPsi,
}

impl LimitExpression {
    pub const BOTH: [LimitExpression; 2] = [
        LimitExpression::RaisingOverPsi,
        LimitExpression::LoweringTimesPsi,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LimitExpression::RaisingOverPsi => "(nu+m)/psi_m",
            LimitExpression::LoweringTimesPsi => "(nu-m)*psi_m",
        }
    }
}

impl Serialize for LimitExpression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub nu0: f64,
    pub m: i64,
    pub exists: bool,
    pub value: [f64; 2],
    pub rate: Option<f64>,
    pub direction: Direction,
    #[serde(rename = "expr")]
    pub expression: LimitExpression,
}

impl ProbeReport {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

pub fn probe_limit(
    psi: &PsiHandle,
    m: i64,
    expression: LimitExpression,
    probe: &LimitProbe,
) -> Result<ProbeReport> {
    let seq = probe_sequence(
        |z| {
            let nu = NuParameter::Float(z);
            let p = psi.evaluate(m, &nu)?.to_float();
            Ok(match expression {
                LimitExpression::RaisingOverPsi => (z + m as f64) / p,
                LimitExpression::LoweringTimesPsi => (z - m as f64) * p,
            })
        },
        probe,
    )?;
    Ok(ProbeReport {
        nu0: probe.nu0.re,
        m,
        exists: seq.exists,
        value: seq.value,
        rate: seq.rate,
        direction: probe.direction,
        expression,
    })
}

/// Probes from above, below and along the imaginary axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CombinedProbe {
    pub exists: bool,
    pub value: [f64; 2],
    pub probes: Vec<ProbeReport>,
}

pub fn probe_limit_all_directions(
    psi: &PsiHandle,
    m: i64,
    expression: LimitExpression,
    nu0: f64,
    tol: f64,
) -> Result<CombinedProbe> {
    let probes: Vec<ProbeReport> = Direction::ALL
        .iter()
        .map(|&d| probe_limit(psi, m, expression, &LimitProbe::new(nu0, d).with_tol(tol)))
        .collect::<Result<_>>()?;
    let first = probes[0].value();
    let scale = first.norm().max(1.0);
    let agree = probes
        .iter()
        .all(|p| (p.value() - first).norm() <= tol * scale);
    Ok(CombinedProbe {
        exists: agree && probes.iter().all(|p| p.exists),
        value: probes[0].value,
        probes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleCheck {
    pub nu: String,
    pub m: i64,
    pub product: String,
    pub expected: String,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleReport {
    pub family: String,
    pub epsilon: i64,
    pub checks: Vec<PoleCheck>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks `alpha_m(nu) beta_m(nu) = (nu^2 - m^2)/4` on interior coefficients,
/// with `alpha`, `beta` read off the built operators.
///
/// Exact parameters must match exactly; float parameters within `tol`.
pub fn pole_obstruction_check(
    kind: FamilyKind,
    epsilon: i64,
    grid: &[NuParameter],
    window: i64,
    tol: f64,
) -> Result<PoleReport> {
    let mut checks = Vec::new();
    for nu in grid {
        let spec = FamilySpec::new(kind, epsilon, nu.clone(), window)?;
        let ops = build(&spec)?;
        let w = ops.window();
        let quarter = rat(1, 4);
        for m in w
            .coefficient_indices()
            .filter(|m| w.is_interior(m - 1) && w.is_interior(m + 1))
        {
            let product = ops.alpha(m).mul(&ops.beta(m));
            let expected = match nu.exact() {
                Some(c) => Scalar::from_crat((&(&c * &c) - &CRat::from_int(m * m)).scale(&quarter)),
                None => {
                    let z = nu.to_complex();
                    Scalar::Float((z * z - (m * m) as f64) * 0.25)
                }
            };
            let deviation = (product.to_float() - expected.to_float()).norm();
            let pass = if nu.is_exact() {
                product == expected
            } else {
                deviation <= tol
            };
            checks.push(PoleCheck {
                nu: nu.to_string(),
                m,
                product: product.to_string(),
                expected: expected.to_string(),
                deviation,
                pass,
            });
        }
    }
    let max_deviation = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
    let passed = checks.iter().all(|c| c.pass);
    Ok(PoleReport {
        family: kind.to_string(),
        epsilon,
        checks,
        max_deviation,
        passed,
    })
}

/// `delta0 * 2^-k` for `k = 0..=steps`.
pub fn dyadic_offsets(delta0: f64, steps: u32) -> Vec<f64> {
    (0..=steps)
        .map(|k| delta0 * 0.5f64.powi(k as i32))
        .collect()
}

/// Least-squares slope of `log |one-sided difference quotient|` against `log delta`.
///
/// At each offset the larger of the forward and backward quotient magnitudes
/// is used. A slope near 0 means the quotients settle (differentiable); a slope
/// of `-1/2` means they blow up like `delta^(-1/2)`.
pub fn differentiability_probe(entry: impl Fn(f64) -> f64, nu0: f64, offsets: &[f64]) -> f64 {
    let center = entry(nu0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = offsets
        .iter()
        .map(|&d| {
            let fwd = ((entry(nu0 + d) - center) / d).abs();
            let bwd = ((center - entry(nu0 - d)) / d).abs();
            (d.ln(), fwd.max(bwd).max(f64::MIN_POSITIVE).ln())
        })
        .unzip();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// The real `E` coefficient `alpha_m(nu)` of a named family, as a function of real `nu`.
pub fn raising_entry(kind: FamilyKind, epsilon: i64, m: i64) -> impl Fn(f64) -> f64 {
    let window = (m.abs() + 6).max(WeightWindow::MIN_BOUND);
    move |x| {
        let spec = FamilySpec::new(
            kind,
            epsilon,
            NuParameter::Float(Complex64::new(x, 0.0)),
            window,
        )
        .expect("valid spec");
        build(&spec).expect("named family").alpha(m).to_float().re
    }
}
