//! Lie relations, the Casimir scalar, and composition series read off from the
//! zeros of `E` and `F`.
//!
//! A zero `E v_j = 0` is a wall between `j` and `j+2` that nothing crosses
//! upwards; a zero `F v_j = 0` is a wall between `j-2` and `j` that nothing
//! crosses downwards. Walls cut the weight line into the supports of the
//! composition factors. In bracket strings a wall closed from below (an
//! `E`-zero) is written `]`, one closed from above (an `F`-zero) `[`, and a
//! wall closed from both sides `] [`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{
    build, is_reducibility_point, FamilySpec, OperatorTriple, WeightOperator, WeightWindow,
};
use crate::scalar::{RadicalScalar, Scalar};

fn require_exact(ops: &OperatorTriple) -> Result<()> {
    if ops.is_exact() {
        Ok(())
    } else {
        Err(Error::FloatNotSupported)
    }
}

/// `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H` applied to `v_j`, as
/// `(lhs, rhs)` pairs of coefficients.
fn bracket_sides(ops: &OperatorTriple, j: i64) -> Result<[(Scalar, Scalar); 3]> {
    let (h, e, f) = (&ops.h, &ops.e, &ops.f);
    let two = Scalar::Exact(RadicalScalar::from_int(2));
    let he = h.coeff(j + 2).sub(&h.coeff(j))?.mul(&e.coeff(j));
    let hf = h.coeff(j - 2).sub(&h.coeff(j))?.mul(&f.coeff(j));
    let ef = e
        .coeff(j - 2)
        .mul(&f.coeff(j))
        .sub(&f.coeff(j + 2).mul(&e.coeff(j)));
    // a difference of unlike radicals is never rational, so it cannot equal H
    let ef = match ef {
        Ok(v) => v,
        Err(Error::NonClosedSum(..)) => Scalar::Float(Complex64::new(f64::NAN, f64::NAN)),
        Err(other) => return Err(other),
    };
    Ok([
        (he, two.mul(&e.coeff(j))),
        (hf, two.neg().mul(&f.coeff(j))),
        (ef, h.coeff(j)),
    ])
}

/// Exact check of the three defining relations on every interior weight.
pub fn verify_brackets(ops: &OperatorTriple) -> Result<bool> {
    require_exact(ops)?;
    for j in ops.window().interior_weights() {
        if bracket_sides(ops, j)?.iter().any(|(l, r)| l != r) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same relations within an absolute tolerance, for any scalars.
pub fn verify_brackets_approx(ops: &OperatorTriple, tol: f64) -> Result<bool> {
    for j in ops.window().interior_weights() {
        for (l, r) in bracket_sides(ops, j)? {
            let gap = (l.to_float() - r.to_float()).norm();
            if gap.is_nan() || gap > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Diagonal of `Omega = H^2 + 2(EF + FE)` at `v_j`.
fn casimir_at(ops: &OperatorTriple, j: i64) -> Result<Scalar> {
    let (h, e, f) = (&ops.h, &ops.e, &ops.f);
    let hh = h.coeff(j).mul(&h.coeff(j));
    let ef = e.coeff(j - 2).mul(&f.coeff(j));
    let fe = f.coeff(j + 2).mul(&e.coeff(j));
    let two = crate::scalar::rat_int(2);
    hh.add(&ef.add(&fe)?.scale_rat(&two))
}

/// The scalar by which the Casimir acts, or `CasimirMismatch`.
pub fn casimir_scalar(ops: &OperatorTriple) -> Result<RadicalScalar> {
    require_exact(ops)?;
    let mut value: Option<Scalar> = None;
    for j in ops.window().interior_weights() {
        let here = casimir_at(ops, j).map_err(|_| Error::CasimirMismatch { weight: j })?;
        match &value {
            None => value = Some(here),
            Some(v) if *v == here => {}
            Some(_) => return Err(Error::CasimirMismatch { weight: j }),
        }
    }
    match value {
        Some(Scalar::Exact(r)) => Ok(r),
        _ => Err(Error::FloatNotSupported),
    }
}

pub fn casimir_scalar_approx(ops: &OperatorTriple, tol: f64) -> Result<Complex64> {
    let mut value: Option<Complex64> = None;
    for j in ops.window().interior_weights() {
        let here = casimir_at(ops, j)?.to_float();
        match value {
            None => value = Some(here),
            Some(v) if (v - here).norm() <= tol => {}
            Some(_) => return Err(Error::CasimirMismatch { weight: j }),
        }
    }
    value.ok_or(Error::CasimirMismatch { weight: 0 })
}

/// Weights killed by `E` and by `F`, scanned over `|j| <= N - 3` so that a
/// wall at `|nu| + 1` stays visible whenever `N >= |nu| + 4`. Entries dropped at
/// the window edge are absent, never zero, so they do not register.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AnnihilationPattern {
    pub e_zeros: BTreeSet<i64>,
    pub f_zeros: BTreeSet<i64>,
}

const PATTERN_MARGIN: i64 = 3;

pub fn annihilation_pattern(e: &WeightOperator, f: &WeightOperator) -> AnnihilationPattern {
    let zeros = |op: &WeightOperator| -> BTreeSet<i64> {
        let w = op.window();
        w.weights()
            .filter(|&j| j.abs() <= w.bound() - PATTERN_MARGIN)
            .filter(|&j| op.entry(j).is_some_and(Scalar::is_zero))
            .collect()
    };
    AnnihilationPattern {
        e_zeros: zeros(e),
        f_zeros: zeros(f),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorLabel {
    /// `F_n`, dimension `n`.
    FiniteDim(u32),
    /// `D_n`, lowest weight `n + 1`.
    HoloDS(u32),
    /// `D_{-n}`, highest weight `-n - 1`.
    AntiHoloDS(u32),
    /// `L^+`, lowest weight 1.
    LimitPlus,
    /// `L^-`, highest weight -1.
    LimitMinus,
    IrreduciblePS,
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorLabel::FiniteDim(n) => write!(f, "F_{n}"),
            FactorLabel::HoloDS(n) => write!(f, "D_{n}"),
            FactorLabel::AntiHoloDS(n) => write!(f, "D_{{-{n}}}"),
            FactorLabel::LimitPlus => write!(f, "L^+"),
            FactorLabel::LimitMinus => write!(f, "L^-"),
            FactorLabel::IrreduciblePS => write!(f, "PS"),
        }
    }
}

impl Serialize for FactorLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One composition factor and where it sits on the weight line.
///
/// `lo`/`hi` are `None` for a tail that runs off the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub label: FactorLabel,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    /// No `F` escapes below `lo`.
    pub closed_below: bool,
    /// No `E` escapes above `hi`.
    pub closed_above: bool,
}

impl Segment {
    pub fn contains(&self, j: i64) -> bool {
        self.lo.is_none_or(|lo| j >= lo) && self.hi.is_none_or(|hi| j <= hi)
    }

    /// Closed under `E` and `F`: an irreducible submodule.
    pub fn is_submodule(&self) -> bool {
        self.closed_below && self.closed_above
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub factors: Vec<FactorLabel>,
    #[serde(rename = "bracket")]
    pub bracket_string: String,
    #[serde(rename = "completelyReducible")]
    pub completely_reducible: bool,
    pub indecomposable: bool,
    #[serde(skip)]
    pub segments: Vec<Segment>,
}

impl SeriesReport {
    pub fn is_reducible(&self) -> bool {
        self.segments.len() > 1
    }

    pub fn sorted_factors(&self) -> Vec<FactorLabel> {
        let mut v = self.factors.clone();
        v.sort();
        v
    }
}

#[derive(Clone, Copy, Default)]
struct Wall {
    e_closed: bool,
    f_closed: bool,
}

impl Wall {
    fn symbol(self) -> &'static str {
        match (self.e_closed, self.f_closed) {
            (true, true) => "] [",
            (true, false) => "]",
            (false, true) => "[",
            (false, false) => unreachable!("walls carry at least one zero"),
        }
    }
}

fn label_segment(lo: Option<i64>, hi: Option<i64>) -> Result<FactorLabel> {
    let unknown =
        || Error::PreconditionViolated(format!("segment {lo:?}..{hi:?} matches no known factor"));
    match (lo, hi) {
        (None, None) => Ok(FactorLabel::IrreduciblePS),
        (Some(lo), Some(hi)) => Ok(FactorLabel::FiniteDim(((hi - lo) / 2 + 1) as u32)),
        (Some(1), None) => Ok(FactorLabel::LimitPlus),
        (Some(lo), None) if lo >= 2 => Ok(FactorLabel::HoloDS((lo - 1) as u32)),
        (None, Some(-1)) => Ok(FactorLabel::LimitMinus),
        (None, Some(hi)) if hi <= -2 => Ok(FactorLabel::AntiHoloDS((-hi - 1) as u32)),
        _ => Err(unknown()),
    }
}

/// Composition series of a built module from its annihilation walls.
pub fn series_from_pattern(pattern: &AnnihilationPattern) -> Result<SeriesReport> {
    // walls keyed by the weight just below the gap
    let mut walls: BTreeMap<i64, Wall> = BTreeMap::new();
    for &j in &pattern.e_zeros {
        walls.entry(j).or_default().e_closed = true;
    }
    for &j in &pattern.f_zeros {
        walls.entry(j - 2).or_default().f_closed = true;
    }

    let mut segments = Vec::new();
    let mut bracket = String::from("(");
    let mut lo: Option<i64> = None;
    let mut closed_below = true;
    for (&gap, &wall) in &walls {
        let label = label_segment(lo, Some(gap))?;
        segments.push(Segment {
            label,
            lo,
            hi: Some(gap),
            closed_below,
            closed_above: wall.e_closed,
        });
        bracket.push_str(&format!("{label} {} ", wall.symbol()));
        lo = Some(gap + 2);
        closed_below = wall.f_closed;
    }
    let label = label_segment(lo, None)?;
    segments.push(Segment {
        label,
        lo,
        hi: None,
        closed_below,
        closed_above: true,
    });
    bracket.push_str(&format!("{label})"));

    let completely_reducible = walls.values().all(|w| w.e_closed && w.f_closed);
    let reducible = !walls.is_empty();
    Ok(SeriesReport {
        factors: segments.iter().map(|s| s.label).collect(),
        bracket_string: bracket,
        completely_reducible,
        indecomposable: reducible && !completely_reducible,
        segments,
    })
}

/// Composition series of the module described by `spec`.
///
/// At a reducibility point the window must show every wall plus margin:
/// `N >= |nu| + 4`.
pub fn series_report(spec: &FamilySpec) -> Result<SeriesReport> {
    if is_reducibility_point(&spec.nu, spec.parity) {
        let n = spec.nu.as_integer().unwrap_or(0).abs();
        let needed = (n + WeightWindow::MARGIN).max(WeightWindow::MIN_BOUND);
        if spec.window < needed {
            return Err(Error::WindowTooSmall {
                bound: spec.window,
                needed,
            });
        }
    }
    let ops = build(spec)?;
    series_from_pattern(&annihilation_pattern(&ops.e, &ops.f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyKind;
    use crate::scalar::{rat_int, CRat, NuParameter};

    fn ops(kind: FamilyKind, eps: i64, nu: NuParameter, n: i64) -> OperatorTriple {
        build(&FamilySpec::new(kind, eps, nu, n).unwrap()).unwrap()
    }

    fn report(kind: FamilyKind, eps: i64, nu: i64) -> SeriesReport {
        series_report(&FamilySpec::new(kind, eps, NuParameter::int(nu), 20).unwrap()).unwrap()
    }

    #[test]
    fn brackets_hold() {
        assert!(verify_brackets(&ops(FamilyKind::Pi0, 1, NuParameter::int(3), 20)).unwrap());
        assert!(
            verify_brackets(&ops(FamilyKind::PiDeformed, -1, NuParameter::int(2), 20)).unwrap()
        );
        assert!(
            verify_brackets(&ops(FamilyKind::PiDeformed, 1, NuParameter::real(7, 2), 20)).unwrap()
        );
        assert!(
            verify_brackets(&ops(FamilyKind::PiPrime, -1, NuParameter::imag(2, 3), 20)).unwrap()
        );
    }

    #[test]
    fn corrupted_entry_breaks_brackets() {
        let mut o = ops(FamilyKind::PiDeformed, 1, NuParameter::real(7, 2), 20);
        let (_, v) = o.e.entries_mut().find(|(j, _)| *j == 2).unwrap();
        *v = v.scale_rat(&rat_int(2));
        assert!(!verify_brackets(&o).unwrap());
    }

    #[test]
    fn float_needs_approx() {
        let o = ops(
            FamilyKind::PiDeformed,
            1,
            NuParameter::Float(Complex64::new(2.3, 0.4)),
            20,
        );
        assert_eq!(verify_brackets(&o), Err(Error::FloatNotSupported));
        assert!(verify_brackets_approx(&o, 1e-10).unwrap());
        let c = casimir_scalar_approx(&o, 1e-10).unwrap();
        let nu = Complex64::new(2.3, 0.4);
        assert!((c - (nu * nu - 1.0)).norm() < 1e-10);
    }

    #[test]
    fn casimir_values() {
        let c = casimir_scalar(&ops(FamilyKind::Pi0, 1, NuParameter::int(3), 20)).unwrap();
        assert_eq!(c, RadicalScalar::from_int(8));
        let c = casimir_scalar(&ops(
            FamilyKind::PiDeformed,
            -1,
            NuParameter::imag(1, 1),
            20,
        ))
        .unwrap();
        assert_eq!(c, RadicalScalar::from_int(-2));
        let c = casimir_scalar(&ops(FamilyKind::Pi0, 1, NuParameter::int(0), 20)).unwrap();
        assert_eq!(c, RadicalScalar::from_int(-1));
    }

    #[test]
    fn casimir_detects_non_scalar_action() {
        let mut o = ops(FamilyKind::Pi0, 1, NuParameter::int(3), 20);
        let (_, v) = o.f.entries_mut().find(|(j, _)| *j == 6).unwrap();
        *v = Scalar::from_crat(CRat::from_int(5));
        assert!(matches!(
            casimir_scalar(&o),
            Err(Error::CasimirMismatch { .. })
        ));
    }

    #[test]
    fn annihilation_patterns() {
        let o = ops(FamilyKind::Pi0, 1, NuParameter::int(3), 20);
        let p = annihilation_pattern(&o.e, &o.f);
        assert_eq!(p.e_zeros, BTreeSet::from([-4]));
        assert_eq!(p.f_zeros, BTreeSet::from([4]));
        let o = ops(FamilyKind::PiDeformed, 1, NuParameter::int(3), 20);
        let p = annihilation_pattern(&o.e, &o.f);
        assert_eq!(p.e_zeros, BTreeSet::from([-4, 2]));
        assert_eq!(p.f_zeros, BTreeSet::from([-2, 4]));
        let o = ops(FamilyKind::Pi0, -1, NuParameter::int(0), 20);
        let p = annihilation_pattern(&o.e, &o.f);
        assert_eq!(p.e_zeros, BTreeSet::from([-1]));
        assert_eq!(p.f_zeros, BTreeSet::from([1]));
    }

    #[test]
    fn series_examples() {
        use FactorLabel::*;
        let r = report(FamilyKind::Pi0, 1, 3);
        assert_eq!(
            r.sorted_factors(),
            vec![FiniteDim(3), HoloDS(3), AntiHoloDS(3)]
        );
        assert_eq!(r.bracket_string, "(D_{-3} ] F_3 [ D_3)");
        assert!(r.indecomposable && !r.completely_reducible);

        let r = report(FamilyKind::Pi0, -1, 0);
        assert_eq!(r.factors, vec![LimitMinus, LimitPlus]);
        assert_eq!(r.bracket_string, "(L^- ] [ L^+)");
        assert!(r.completely_reducible && !r.indecomposable);

        let r = report(FamilyKind::PiDeformed, 1, 3);
        assert_eq!(
            r.sorted_factors(),
            vec![FiniteDim(3), HoloDS(3), AntiHoloDS(3)]
        );
        assert!(r.completely_reducible);
        assert_eq!(r.bracket_string, "(D_{-3} ] [ F_3 ] [ D_3)");

        assert_eq!(
            report(FamilyKind::PiPrime, 1, 3).bracket_string,
            "(D_{-3} ] F_3 ] D_3)"
        );
        assert_eq!(
            report(FamilyKind::PiPrime, 1, -3).bracket_string,
            "(D_{-3} [ F_3 [ D_3)"
        );
        assert_eq!(
            report(FamilyKind::Pi0, 1, -3).bracket_string,
            "(D_{-3} [ F_3 ] D_3)"
        );
    }

    #[test]
    fn irreducible_points() {
        let r = report(FamilyKind::Pi0, 1, 2);
        assert_eq!(r.factors, vec![FactorLabel::IrreduciblePS]);
        assert_eq!(r.bracket_string, "(PS)");
        assert!(!r.is_reducible() && r.completely_reducible && !r.indecomposable);
    }

    #[test]
    fn submodules_of_pi() {
        let r = report(FamilyKind::Pi0, 1, 3);
        let subs: Vec<_> = r
            .segments
            .iter()
            .filter(|s| s.is_submodule())
            .map(|s| s.label)
            .collect();
        assert_eq!(
            subs,
            vec![FactorLabel::AntiHoloDS(3), FactorLabel::HoloDS(3)]
        );
        let r = report(FamilyKind::Pi0, 1, -3);
        let subs: Vec<_> = r
            .segments
            .iter()
            .filter(|s| s.is_submodule())
            .map(|s| s.label)
            .collect();
        assert_eq!(subs, vec![FactorLabel::FiniteDim(3)]);
    }

    #[test]
    fn window_precondition() {
        let s = FamilySpec::new(FamilyKind::Pi0, 1, NuParameter::int(5), 8).unwrap();
        assert_eq!(
            series_report(&s),
            Err(Error::WindowTooSmall {
                bound: 8,
                needed: 9
            })
        );
        for nu in [5, -5] {
            let s = FamilySpec::new(FamilyKind::Pi0, 1, NuParameter::int(nu), 9).unwrap();
            let r = series_report(&s).unwrap();
            assert_eq!(
                r.sorted_factors(),
                vec![
                    FactorLabel::FiniteDim(5),
                    FactorLabel::HoloDS(5),
                    FactorLabel::AntiHoloDS(5)
                ]
            );
        }
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(report(FamilyKind::Pi0, 1, 3)).unwrap();
        assert_eq!(v["bracket"], "(D_{-3} ] F_3 [ D_3)");
        assert_eq!(v["factors"][0], "D_{-3}");
        assert_eq!(v["completelyReducible"], false);
        assert_eq!(v["indecomposable"], true);
        assert!(v.get("segments").is_none());
    }
}
