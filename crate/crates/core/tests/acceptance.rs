//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::process::{Command, ExitCode};
use std::time::Instant;

use sl2deform::deform::{
    conjugate_by_s, differentiability_probe, dyadic_offsets, phi_table, pole_obstruction_check,
    probe_limit_all_directions, raising_entry, LimitExpression, PsiHandle,
};
use sl2deform::families::{build, build_Pi, build_pi, is_reducibility_point, FamilyKind};
use sl2deform::hermitian::{
    alternates_then_constant, form_on_Pi, form_on_pi, one_sided_limits, radical_of_form,
    verify_invariance,
};
use sl2deform::scalar::rat;
use sl2deform::structure::{casimir_scalar, series_report, verify_brackets, FactorLabel};
use sl2deform::toy::{delta_limit, jordan_block, toy_Pi_limit, toy_conjugation_check};
use sl2deform::{CRat, FamilySpec, NuParameter, Parity, RadicalScalar};

const N: i64 = 50;
const EPS: [i64; 2] = [1, -1];

fn grid() -> Vec<NuParameter> {
    let mut g: Vec<NuParameter> = (-4..=4).map(NuParameter::int).collect();
    g.extend([
        NuParameter::real(7, 2),
        NuParameter::real(-5, 2),
        NuParameter::imag(1, 1),
        NuParameter::imag(2, 1),
        NuParameter::imag(1, 3),
    ]);
    g
}

fn spec(kind: FamilyKind, eps: i64, nu: &NuParameter) -> FamilySpec {
    FamilySpec::new(kind, eps, nu.clone(), N).expect("spec")
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn brackets_and_casimir() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for nu in grid() {
        let c = nu.exact().expect("exact grid");
        let want = RadicalScalar::from_crat(&(&c * &c) - &CRat::one());
        for kind in FamilyKind::NAMED {
            for eps in EPS {
                let ops = build(&spec(kind, eps, &nu)).map_err(|e| e.to_string())?;
                let ok = verify_brackets(&ops).map_err(|e| e.to_string())?;
                check(ok, || format!("brackets fail: {kind} eps={eps} nu={nu}"))?;
                let got = casimir_scalar(&ops).map_err(|e| e.to_string())?;
                check(got == want, || {
                    format!("casimir {got} != {want}: {kind} eps={eps} nu={nu}")
                })?;
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.2}s"))?;
    Ok(format!("{count} modules exact on N={N} in {secs:.2}s"))
}

fn reducibility_dichotomy() -> Outcome {
    for nu in grid() {
        for eps in EPS {
            let wall = is_reducibility_point(&nu, Parity::from_epsilon(eps).unwrap());
            for kind in FamilyKind::NAMED {
                let r = series_report(&spec(kind, eps, &nu)).map_err(|e| e.to_string())?;
                check(r.is_reducible() == wall, || {
                    format!("{kind} eps={eps} nu={nu}: reducible={}", r.is_reducible())
                })?;
                if kind == FamilyKind::Pi0 && wall {
                    let exempt = eps == -1 && nu.as_integer() == Some(0);
                    check(r.completely_reducible == exempt, || {
                        format!(
                            "pi eps={eps} nu={nu}: completelyReducible={}",
                            r.completely_reducible
                        )
                    })?;
                }
                if kind == FamilyKind::PiDeformed {
                    check(r.completely_reducible, || {
                        format!("Pi eps={eps} nu={nu} not completely reducible")
                    })?;
                }
            }
        }
    }
    Ok("reducible exactly on Z_{-eps}; pi split only at (-1,0); Pi always split".into())
}

fn composition_factors() -> Outcome {
    for (n, eps) in [(3i64, 1i64), (4, -1)] {
        let nu = NuParameter::int(n);
        let mut want = vec![
            FactorLabel::FiniteDim(n as u32),
            FactorLabel::HoloDS(n as u32),
            FactorLabel::AntiHoloDS(n as u32),
        ];
        want.sort();
        for kind in FamilyKind::NAMED {
            let r = series_report(&spec(kind, eps, &nu)).map_err(|e| e.to_string())?;
            check(r.sorted_factors() == want, || {
                format!("{kind} n={n}: {:?}", r.factors)
            })?;
            let expect = match kind {
                FamilyKind::Pi0 => Some(format!("(D_{{-{n}}} ] F_{n} [ D_{n})")),
                FamilyKind::PiPrime => Some(format!("(D_{{-{n}}} ] F_{n} ] D_{n})")),
                _ => None,
            };
            if let Some(s) = expect {
                check(r.bracket_string == s, || {
                    format!("{kind} n={n}: {} != {s}", r.bracket_string)
                })?;
            }
        }
    }
    Ok("factors {F_n, D_n, D_-n}; pi and piPrime bracket strings match".into())
}

fn intertwiner() -> Outcome {
    let mut count = 0;
    for (p, q) in [(1, 2), (3, 2), (7, 2), (9, 2)] {
        let nu = NuParameter::real(p, q);
        for eps in EPS {
            let pi = build_pi(&spec(FamilyKind::Pi0, eps, &nu)).map_err(|e| e.to_string())?;
            let big =
                build_Pi(&spec(FamilyKind::PiDeformed, eps, &nu)).map_err(|e| e.to_string())?;
            let phi = phi_table(&nu, pi.window()).map_err(|e| e.to_string())?;
            let conj = conjugate_by_s(&pi, &phi).map_err(|e| e.to_string())?;
            check(conj == big, || {
                format!("S-conjugate differs from Pi at eps={eps} nu={nu}")
            })?;
            count += 1;
        }
    }
    for nu in [NuParameter::imag(1, 1), NuParameter::imag(2, 1)] {
        for eps in EPS {
            let pi = build_pi(&spec(FamilyKind::Pi0, eps, &nu)).map_err(|e| e.to_string())?;
            let big =
                build_Pi(&spec(FamilyKind::PiDeformed, eps, &nu)).map_err(|e| e.to_string())?;
            check(pi == big, || format!("Pi != pi at eps={eps} nu={nu}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} exact operator identities"))
}

fn limits() -> Outcome {
    let canonical = PsiHandle::canonical();
    let mut worst: f64 = 0.0;
    for m in 1..=4i64 {
        for nu0 in [m as f64, -(m as f64)] {
            for expr in LimitExpression::BOTH {
                let p = probe_limit_all_directions(&canonical, m, expr, nu0, 1e-6)
                    .map_err(|e| e.to_string())?;
                let size = (p.value[0].powi(2) + p.value[1].powi(2)).sqrt();
                worst = worst.max(size);
                check(p.exists && size <= 1e-6, || {
                    format!(
                        "m={m} nu0={nu0} {}: exists={} value={:?}",
                        expr.label(),
                        p.exists,
                        p.value
                    )
                })?;
            }
        }
    }
    let trivial = PsiHandle::trivial();
    for m in 1..=4i64 {
        let p = probe_limit_all_directions(
            &trivial,
            m,
            LimitExpression::RaisingOverPsi,
            m as f64,
            1e-6,
        )
        .map_err(|e| e.to_string())?;
        let size = (p.value[0].powi(2) + p.value[1].powi(2)).sqrt();
        check(p.exists && size > 1e-3, || {
            format!("psi=1 m={m}: limit {:?}", p.value)
        })?;
    }
    Ok(format!(
        "canonical limits vanish (max |value| {worst:.1e}); psi=1 limits nonzero"
    ))
}

fn pole_obstruction() -> Outcome {
    let g = grid();
    for kind in FamilyKind::NAMED {
        for eps in EPS {
            let r = pole_obstruction_check(kind, eps, &g, N, 0.0).map_err(|e| e.to_string())?;
            check(r.passed, || {
                format!("alpha*beta mismatch for {kind} eps={eps}")
            })?;
        }
    }
    let offsets = dyadic_offsets(0.125, 20);
    let mut slopes = Vec::new();
    for (m, eps) in [(2i64, -1i64), (3, 1)] {
        let s = differentiability_probe(
            raising_entry(FamilyKind::PiDeformed, eps, m),
            m as f64,
            &offsets,
        );
        check((s + 0.5).abs() <= 0.05, || {
            format!("Pi slope at m={m}: {s}")
        })?;
        let t = differentiability_probe(raising_entry(FamilyKind::Pi0, eps, m), m as f64, &offsets);
        check(t.abs() < 0.05, || format!("pi slope at m={m}: {t}"))?;
        slopes.push(format!("m={m}: Pi {s:.4}, pi {t:.4}"));
    }
    Ok(format!("alpha*beta exact; slopes {}", slopes.join("; ")))
}

fn hermitian() -> Outcome {
    for nu in [NuParameter::real(1, 2), NuParameter::imag(1, 1)] {
        for eps in EPS {
            let form = form_on_pi(eps, &nu, N).map_err(|e| e.to_string())?;
            let ops = build(&spec(FamilyKind::Pi0, eps, &nu)).map_err(|e| e.to_string())?;
            check(ops.is_exact() && verify_invariance(&ops, &form), || {
                format!("pi form eps={eps} nu={nu}")
            })?;
        }
    }
    for (p, q) in [(7, 2), (9, 2)] {
        let nu = NuParameter::real(p, q);
        for eps in EPS {
            let form = form_on_Pi(eps, &nu, N).map_err(|e| e.to_string())?;
            let ops = build(&spec(FamilyKind::PiDeformed, eps, &nu)).map_err(|e| e.to_string())?;
            check(ops.is_exact() && verify_invariance(&ops, &form), || {
                format!("Pi form eps={eps} nu={nu}")
            })?;
            check(
                form.iter()
                    .all(|(j, _)| matches!(form.sign(j), Some(1) | Some(-1)))
                    && form
                        .iter()
                        .all(|(_, v)| v.exact().and_then(|r| r.as_crat()).is_some()),
                || format!("Pi form not +-1 at eps={eps} nu={nu}"),
            )?;
            check(alternates_then_constant(&form, &rat(p, q)), || {
                format!("sign pattern eps={eps} nu={nu}")
            })?;
        }
    }
    let limit = form_on_pi(1, &NuParameter::int(3), N).map_err(|e| e.to_string())?;
    let radical = radical_of_form(&limit);
    let want: std::collections::BTreeSet<i64> = limit
        .iter()
        .map(|(j, _)| j)
        .filter(|j| j.abs() >= 4)
        .collect();
    check(radical == want, || {
        format!("radical at (+1,3): {radical:?}")
    })?;
    let sided = one_sided_limits(1, 3, N).map_err(|e| e.to_string())?;
    for table in [&sided.left, &sided.right] {
        check(
            table
                .iter()
                .all(|(j, _)| matches!(table.sign(j), Some(1) | Some(-1))),
            || "one-sided limit at 3 is degenerate".to_string(),
        )?;
    }
    Ok(format!(
        "invariance exact; radical at (+1,3) has {} weights, all |j|>=4",
        radical.len()
    ))
}

fn toy() -> Outcome {
    for nu in [1.0, -0.5, 0.25] {
        check(toy_conjugation_check(nu) == Ok(true), || {
            format!("conjugation fails at nu={nu}")
        })?;
    }
    let mut worst: f64 = 0.0;
    for t in [0.0, 1.0, -2.0] {
        let l = toy_Pi_limit(t);
        let e = (l.exp_limit - jordan_block(t))
            .amax()
            .max((l.delta_limit - delta_limit()).amax());
        worst = worst.max(e);
        check(e <= 1e-8, || format!("limit off by {e:e} at t={t}"))?;
    }
    Ok(format!(
        "conjugation within 1e-12; limits within {worst:.1e}"
    ))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_sl2deform"))
            .args([
                "structure",
                "--nu-grid",
                "0..4",
                "--epsilon",
                "1",
                "--format",
                "json",
            ])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    check(a.status.success() && b.status.success(), || {
        format!("exit {:?} / {:?}", a.status, b.status)
    })?;
    check(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "outputs differ".to_string()
    })?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact brackets and Casimir", brackets_and_casimir),
        ("reducibility dichotomy", reducibility_dichotomy),
        ("composition factors", composition_factors),
        ("intertwiner identity", intertwiner),
        ("limit behavior", limits),
        ("pole obstruction and differentiability", pole_obstruction),
        ("hermitian forms", hermitian),
        ("toy example", toy),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
