//! The `verify` command: a battery of cross-module invariants with a fault
//! injection switch. Each `--fault NAME` perturbs the named check's data so
//! the harness can prove it actually detects violations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use widths_core::{
    bernstein_rate_isotropic, bernstein_rate_mixed, bnorm, check_bern_gelfand_duality,
    check_pietsch, check_pukhov, enumerate_block, fnorm, sandwich_profile, weyl_rate_isotropic,
    weyl_rate_mixed, width, width_profile, CoeffField, CoreError, Direction, Exponent,
    FiniteOperator, OptimBudget, ParamSet, Result, WidthKind, SANDWICH_SLACK,
};

use crate::commands::Report;
use crate::config::{OutputFormat, PartialConfig};

pub const CHECK_NAMES: [&str; 8] = [
    "duality-products",
    "bern-gelfand",
    "pietsch",
    "sandwich",
    "hilbert-collapse",
    "block-identity",
    "d1-collapse",
    "monotonicity",
];

pub struct VerifyConfig {
    pub budget: OptimBudget,
    pub fault: Option<String>,
}

impl VerifyConfig {
    pub fn resolve(c: PartialConfig) -> Result<VerifyConfig> {
        let def = OptimBudget::default();
        OutputFormat::resolve(c.format, OutputFormat::Text, &[OutputFormat::Text])?;
        if let Some(f) = &c.fault {
            if !CHECK_NAMES.contains(&f.as_str()) {
                return Err(CoreError::invalid(format!(
                    "unknown fault {f:?}; expected one of {}",
                    CHECK_NAMES.join(", ")
                )));
            }
        }
        Ok(VerifyConfig {
            budget: OptimBudget {
                restarts: c.restarts.unwrap_or(def.restarts),
                max_iter: c.max_iter.unwrap_or(def.max_iter),
                seed: c.seed.unwrap_or(def.seed),
            },
            fault: c.fault,
        })
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "command": "verify",
            "fault": self.fault,
            "format": "text",
            "max_iter": self.budget.max_iter,
            "restarts": self.budget.restarts,
            "seed": self.budget.seed,
        })
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn e(p: f64) -> Exponent {
    Exponent::new(p).expect("literal exponent")
}

pub fn run(cfg: &VerifyConfig) -> Result<Report> {
    let fault = |name: &str| cfg.fault.as_deref() == Some(name);
    let checks = [
        duality_products(&cfg.budget, fault("duality-products"))?,
        bern_gelfand(&cfg.budget, fault("bern-gelfand"))?,
        pietsch(&cfg.budget, fault("pietsch"))?,
        sandwich(&cfg.budget, fault("sandwich"))?,
        hilbert_collapse(&cfg.budget, fault("hilbert-collapse"))?,
        block_identity(cfg.budget.seed, fault("block-identity"))?,
        d1_collapse(cfg.budget.seed, fault("d1-collapse"))?,
        monotonicity(&cfg.budget, fault("monotonicity"))?,
    ];
    let passed = checks.iter().filter(|c| c.pass).count();
    let mut s = format!("# config: {}\n", cfg.echo());
    for c in &checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        s.push_str(&format!("check {}: {verdict} {}\n", c.name, c.detail));
    }
    let all = passed == checks.len();
    s.push_str(&format!(
        "verdict: {} ({passed}/{} checks)\n",
        if all { "pass" } else { "FAIL" },
        checks.len()
    ));
    Ok(Report {
        code: if all { 0 } else { 1 },
        bytes: s.into_bytes(),
    })
}

/// Index-shifted Bernstein/Kolmogorov products on dual identity pairs.
fn duality_products(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let tuples = [(2usize, 1.0, 2.0), (2, 2.0, 4.0)];
    let mut pass = true;
    let mut details = Vec::new();
    let mut tol = 0.0;
    for (n, p1, p2) in tuples {
        let rep = check_pukhov(n, e(p1), e(p2), budget)?;
        tol = rep.tolerance;
        let Some(mut product) = rep.product else {
            pass = false;
            details.push(format!("(n={n},p1={p1},p2={p2}) inconclusive"));
            continue;
        };
        if fault {
            product *= 1.5;
        }
        pass &= (product - 1.0).abs() <= rep.tolerance;
        details.push(format!("(n={n},p1={p1},p2={p2}) product={product}"));
    }
    Ok(Check {
        name: "duality-products",
        pass,
        detail: format!("{} tol={tol}", details.join(" ")),
    })
}

/// Bernstein/Gelfand product rule on the invertible identity.
fn bern_gelfand(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let rep = check_bern_gelfand_duality(4, 2, e(1.0), e(2.0), budget)?;
    let mut product = rep.product.unwrap_or(f64::NAN);
    if fault {
        product *= 1.5;
    }
    let pass = product.is_finite() && (product - 1.0).abs() <= rep.tolerance;
    Ok(Check {
        name: "bern-gelfand",
        pass,
        detail: format!("m=4 n=2 p1=1 p2=2 product={product} tol={}", rep.tolerance),
    })
}

/// Bernstein-vs-Weyl geometric mean inequality on a certified Hilbert
/// diagonal.
fn pietsch(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let op = FiniteOperator::diagonal(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0], e(2.0), e(2.0))?;
    let rep = check_pietsch(&op, 3, budget)?;
    let lhs = if fault { rep.lhs * 10.0 } else { rep.lhs };
    let pass = rep.certified && lhs <= rep.rhs + rep.slack;
    Ok(Check {
        name: "pietsch",
        pass,
        detail: format!("n=3 lhs={lhs} rhs={} certified={}", rep.rhs, rep.certified),
    })
}

/// Chain ordering of the five width families on one embedding.
fn sandwich(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let op = FiniteOperator::identity_of(4, e(1.0), e(2.0))?;
    let mut rows = sandwich_profile(&op, 4, budget)?;
    if fault {
        let row = &mut rows[1];
        row.bernstein *= 2.0;
        let mid = row.kolmogorov.min(row.gelfand);
        row.ok = row.bernstein <= mid + SANDWICH_SLACK && mid <= row.approximation + SANDWICH_SLACK;
    }
    match rows.iter().find(|r| !r.ok) {
        Some(bad) => Ok(Check {
            name: "sandwich",
            pass: false,
            detail: format!(
                "violated at n={}: b={} c={} d={} a={}",
                bad.n, bad.bernstein, bad.gelfand, bad.kolmogorov, bad.approximation
            ),
        }),
        None => Ok(Check {
            name: "sandwich",
            pass: true,
            detail: format!("m=4 p1=1 p2=2 rows={}", rows.len()),
        }),
    }
}

/// All five families collapse to singular values on Hilbert pairs.
fn hilbert_collapse(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(0x6869_6c62));
    let mut pass = true;
    let mut max_rel: f64 = 0.0;
    let mut worst = "none".to_string();
    for i in 0..3 {
        let mat = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let op = FiniteOperator::new(mat, e(2.0), e(2.0))?;
        let mut sv = op.singular_values();
        if fault {
            for s in &mut sv {
                *s *= 1.1;
            }
        }
        for kind in WidthKind::ALL {
            for n in 1..=6usize {
                let est = width(&op, kind, n, budget)?;
                let tol = match est.direction {
                    Direction::Exact => 1e-8,
                    _ => 1e-3,
                };
                let rel = (est.value - sv[n - 1]).abs() / sv[n - 1].max(1e-300);
                if rel > max_rel {
                    max_rel = rel;
                    worst = format!("matrix {i} {} n={n}", kind.name());
                }
                pass &= rel <= tol;
            }
        }
    }
    Ok(Check {
        name: "hilbert-collapse",
        pass,
        detail: format!("matrices=3 max_rel={max_rel} at {worst}"),
    })
}

/// f-scale and b-scale norms agree on single-block fields with p = q.
fn block_identity(seed: u64, fault: bool) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x626c_6f63));
    let ps = [1.0, 1.5, 2.0, 3.0];
    let mut max_rel: f64 = 0.0;
    for trial in 0..20u32 {
        let d = 1 + trial % 3;
        let mu = rng.random_range(0..=6u32);
        let p = e(ps[trial as usize % ps.len()]);
        let mut field = CoeffField::new(d as usize)?;
        for idx in enumerate_block(mu, d)?.indices() {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            field.insert(idx, Complex64::new(re, im))?;
        }
        let b = bnorm(&field, 0.7, p, p);
        let mut f = fnorm(&field, 0.7, p, p)?;
        if fault && trial == 0 {
            f *= 1.01;
        }
        max_rel = max_rel.max((f - b).abs() / b.max(1e-300));
    }
    Ok(Check {
        name: "block-identity",
        pass: max_rel <= 1e-10,
        detail: format!("fields=20 max_rel={max_rel} tol=1e-10"),
    })
}

/// At d = 1 the mixed-smoothness tables collapse onto the isotropic ones.
fn d1_collapse(seed: u64, fault: bool) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x6431));
    let mut compared = 0u32;
    let mut skipped = 0u32;
    let mut max_gap: f64 = 0.0;
    for i in 0..200 {
        let p1 = e(rng.random_range(1.0..5.0));
        let p2 = e(rng.random_range(1.05..5.0));
        let gap = (p1.recip() - p2.recip()).max(0.0);
        let t = gap + rng.random_range(0.05..2.0);
        let params = ParamSet::new(1, t, p1, p2, p1)?;
        let pairs = [
            (
                bernstein_rate_isotropic(&params),
                bernstein_rate_mixed(&params),
            ),
            (weyl_rate_isotropic(&params), weyl_rate_mixed(&params)),
        ];
        for (iso, mixed) in pairs {
            match (iso, mixed) {
                (Ok(a), Ok(b)) => {
                    let mut gap = (a.alpha - b.alpha).abs();
                    if fault && i == 0 {
                        gap += 0.01;
                    }
                    max_gap = max_gap.max(gap);
                    compared += 1;
                }
                // A draw inside a guard band is no verdict either way.
                (Err(CoreError::Boundary(_)), _) | (_, Err(CoreError::Boundary(_))) => {
                    skipped += 1;
                }
                (Err(err), _) | (_, Err(err)) => return Err(err),
            }
        }
    }
    Ok(Check {
        name: "d1-collapse",
        pass: max_gap <= 1e-12 && compared >= 300,
        detail: format!("samples=200 comparisons={compared} skipped={skipped} max_gap={max_gap}"),
    })
}

/// Width profiles are nonincreasing in n after monotone post-processing.
fn monotonicity(budget: &OptimBudget, fault: bool) -> Result<Check> {
    let op = FiniteOperator::identity_of(4, e(1.0), e(2.0))?;
    let mut pass = true;
    let mut rows = 0;
    let mut worst = String::new();
    for kind in WidthKind::ALL {
        let mut values: Vec<f64> = width_profile(&op, kind, 4, budget)?
            .iter()
            .map(|est| est.value)
            .collect();
        if fault && kind == WidthKind::Kolmogorov {
            values[1] = values[0] * 1.1;
        }
        rows += values.len();
        for (n, w) in values.windows(2).enumerate() {
            if w[1] > w[0] + 1e-12 {
                pass = false;
                worst = format!(
                    "{} profile increases at n={}: {} -> {}",
                    kind.name(),
                    n + 2,
                    w[0],
                    w[1]
                );
            }
        }
    }
    Ok(Check {
        name: "monotonicity",
        pass,
        detail: if pass {
            format!("profiles=5 rows={rows}")
        } else {
            worst
        },
    })
}
