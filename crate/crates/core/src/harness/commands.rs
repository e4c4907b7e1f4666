//! The experiment commands. Each returns a JSON report embedding the
//! resolved configuration, a list of checks, and the files it wrote.

use super::config::ExperimentConfig;
use super::generators::{bump, generate, grid_for, random_polynomial_field};
use crate::error::{Error, Result};
use crate::oracle::{cap_buckling_shooting, flat_disk_buckling, q_from_holomorphic};
use crate::sphere::{
    el_operator, hat_laplacian, integrate_bulk, sphere_to_stereo, ScalarField,
};
use crate::surface::export::{fmt_f64, write_csv, write_field_csv, write_immersion_csv, write_shadow_obj};
use crate::surface::{build_immersion, conformality_check, mean_curvature_residual, mt_residual, shadow_surface, support_roundtrip};
use crate::variational::{
    area, buckling_eigenvalue, dirichlet_energy, solve_el_clamped, theorem1_check, ClampedBoundaryData,
    ClampedSpace,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Exit status for failed checks; errors carry their own codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Exit code of an error: configuration problems 2, I/O 3, numerical
/// failures 1.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Resolution { .. }
        | Error::InvalidDomain(_)
        | Error::Degenerate(_)
        | Error::NotElSolution { .. }
        | Error::NotClamped { .. } => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_CHECK_FAILED,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            bound,
            passed: value <= bound,
        }
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            bound,
            passed: value >= bound,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub checks: Vec<Check>,
    pub results: Value,
    pub files: Vec<PathBuf>,
    pub config: ExperimentConfig,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn report(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config.to_json(),
            "passed": self.passed(),
            "failures": self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect::<Vec<_>>(),
            "checks": self.checks,
            "results": self.results,
            "files": self.files,
        })
    }

    /// Write the JSON report next to the data files.
    pub fn write_report(&mut self) -> Result<PathBuf> {
        let path = self.config.out_dir.join(format!("{}.json", self.command));
        let mut text = serde_json::to_string_pretty(&self.report()).expect("report serialises");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn rng(cfg: &ExperimentConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

/// Chart, operator and quadrature identities, then the marginally trapped,
/// Lichnerowicz, support and conformality checks on random fields.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    prepare_out_dir(&cfg.out_dir)?;
    let grid = grid_for(cfg)?;
    let tol = cfg.tolerances.quadrature;
    let mut checks = Vec::new();

    let roundtrip = grid
        .nodes()
        .iter()
        .map(|n| {
            let p = sphere_to_stereo(n.sphere);
            (p.u - n.chart.u).abs().max((p.v - n.chart.v).abs())
        })
        .fold(0.0f64, f64::max);
    checks.push(Check::le("chart_roundtrip", roundtrip, tol));
    let dom = grid.domain();
    checks.push(Check::le(
        "bulk_weights_sum_to_area",
        (grid.sum_bulk_weights() - dom.area()).abs() / dom.area(),
        tol,
    ));
    checks.push(Check::le(
        "boundary_weights_sum_to_length",
        (grid.sum_boundary_weights() - dom.boundary_length()).abs() / dom.boundary_length(),
        tol,
    ));
    let quad = ScalarField::nu_poly(&grid, |nu| nu[0].mul_nu(1));
    let lap = hat_laplacian(&quad).axpy(6.0, &quad)?.max_abs();
    checks.push(Check::le("laplacian_of_degree_two_harmonic", lap, tol));
    let linear = ScalarField::linear(&grid, [0.3, -0.8, 0.5]);
    checks.push(Check::le("el_operator_kills_linear", el_operator(&linear).max_abs(), tol));
    let exact = q_from_holomorphic(&crate::oracle::HolomorphicPoly::monomial(2), crate::oracle::Part::Re, dom)?;
    let r = exact.residuals();
    checks.push(Check::le(
        "holomorphic_identities",
        r.laplacian.max(r.shifted).max(r.el),
        tol,
    ));

    let mut rng = rng(cfg);
    let (mut mt, mut lich, mut support, mut conf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut rows = Vec::with_capacity(cfg.random_fields);
    for i in 0..cfg.random_fields {
        let f = random_polynomial_field(&grid, cfg.harmonic_degree, &mut rng);
        let imm = build_immersion(&f);
        let m = mt_residual(&imm).max.unwrap_or(0.0);
        let a = area(&f);
        let s = support_roundtrip(&imm, &f);
        let sup = s.support.max(s.height) / (1.0 + f.max_abs());
        let c = conformality_check(&imm).max_ratio.unwrap_or(0.0);
        mt = mt.max(m);
        lich = lich.max(a.relative_discrepancy());
        support = support.max(sup);
        conf = conf.max(c);
        rows.push(json!({
            "field": i,
            "mt_residual": m,
            "lichnerowicz": a.relative_discrepancy(),
            "support_roundtrip": sup,
            "conformality": c,
            "area": a.total,
        }));
    }
    if cfg.random_fields > 0 {
        checks.push(Check::le("mt_residual_random_fields", mt, tol));
        checks.push(Check::le("lichnerowicz_random_fields", lich, tol));
        checks.push(Check::le("support_roundtrip_random_fields", support, tol));
        checks.push(Check::le("conformality_random_fields", conf, tol));
    }
    Ok(Outcome {
        command: "verify",
        checks,
        results: json!({ "random_fields": rows }),
        files: Vec::new(),
        config: cfg.clone(),
    })
}

/// Area comparison between the EL solution `q` and `f = q + tφ` for each
/// configured amplitude.
pub fn cmd_theorem1(cfg: &ExperimentConfig) -> Result<Outcome> {
    prepare_out_dir(&cfg.out_dir)?;
    let grid = grid_for(cfg)?;
    let generated = generate(cfg, &grid, &mut rng(cfg))?;
    let q = generated.field;
    let imm = build_immersion(&q);
    let area_q = area(&q);
    if imm.is_fully_degenerate() || area_q.ma_total.abs() <= 1e-10 {
        return Err(Error::Degenerate(format!(
            "{} yields a point map (area {:.3e}); nothing to compare",
            generated.label, area_q.ma_total
        )));
    }
    let eig = buckling_eigenvalue(&grid)?;
    let beta1 = eig.beta1;
    let phi = bump(&grid, cfg.bump_modulation);
    let energy_phi = dirichlet_energy(&phi);
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &t in &cfg.amplitudes {
        let f = q.axpy(t, &phi)?;
        let r = theorem1_check(&q, &f, beta1, tol)?;
        let predicted = r.quarter_energy;
        let law = r.gap_law_error;
        checks.push(Check::ge(format!("minimality[t={t}]"), r.area_y.total - r.area_x.total, -tol.slack));
        let (est_name, est) = match cfg.estimate {
            super::config::EstimateForm::Stated => ("est_slack", r.est_slack),
            super::config::EstimateForm::Quarter => ("est_slack_quarter", r.est_slack_quarter),
        };
        checks.push(Check::ge(format!("{est_name}[t={t}]"), est, -tol.slack));
        checks.push(Check::le(format!("gap_law[t={t}]"), law, tol.quadrature));
        checks.push(Check::le(format!("boundary_integrands[t={t}]"), r.boundary_integrand_gap, tol.boundary));
        rows.push(vec![
            fmt_f64(t),
            fmt_f64(r.area_x.total),
            fmt_f64(r.area_y.total),
            fmt_f64(r.gap),
            fmt_f64(predicted),
            fmt_f64(beta1),
            fmt_f64(r.est_term),
            fmt_f64(r.est_slack),
            fmt_f64(r.est_slack_quarter),
            fmt_f64(law),
            fmt_f64(r.boundary_integrand_gap),
        ]);
        summary.push(json!({ "t": t, "predicted_gap": predicted, "gap_law_error": law, "report": r }));
    }
    let csv = cfg.out_dir.join("theorem1.csv");
    write_csv(
        &csv,
        &[
            "t",
            "area_x",
            "area_y",
            "gap",
            "quarter_t2_energy",
            "beta1",
            "est_term",
            "est_slack",
            "est_slack_quarter",
            "gap_law_error",
            "boundary_integrand_gap",
        ],
        rows.into_iter(),
    )?;
    Ok(Outcome {
        command: "theorem1",
        checks,
        results: json!({
            "generator": generated.label,
            "beta1": beta1,
            "energy_phi": energy_phi,
            "area_q": area_q,
            "rows": summary,
        }),
        files: vec![csv],
        config: cfg.clone(),
    })
}

/// Discrete `β₁` along the configured ladder of cap angles, against the
/// axisymmetric shooting oracle.
pub fn cmd_eigen(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.ladder.is_empty() {
        return Err(Error::Config("eigen needs a non-empty ladder of theta0 values".into()));
    }
    for &th in &cfg.ladder {
        crate::sphere::CapDomain::new(th)?;
    }
    prepare_out_dir(&cfg.out_dir)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut betas = Vec::new();
    for &th in &cfg.ladder {
        let sub = ExperimentConfig {
            theta0: th,
            ..cfg.clone()
        };
        let e = buckling_eigenvalue(&grid_for(&sub)?)?;
        let oracle = cap_buckling_shooting(th).ok();
        let rel = oracle.map(|o| (e.beta1 - o).abs() / o);
        let flat = flat_disk_buckling(th)?;
        let agrees = rel.is_some_and(|r| r <= cfg.oracle_tolerance);
        checks.push(Check::ge(format!("beta1_at_least_two[theta0={th}]"), e.beta1, 2.0 - 1e-6));
        checks.push(Check::le(
            format!("oracle_agreement[theta0={th}]"),
            rel.unwrap_or(f64::INFINITY),
            cfg.oracle_tolerance,
        ));
        rows.push(vec![
            fmt_f64(th),
            fmt_f64(e.beta1),
            oracle.map(fmt_f64).unwrap_or_default(),
            rel.map(fmt_f64).unwrap_or_default(),
            fmt_f64(flat),
            e.mode.to_string(),
            u8::from(agrees).to_string(),
        ]);
        table.push(json!({
            "theta0": th,
            "beta1": e.beta1,
            "oracle": oracle,
            "rel_diff": rel,
            "flat_disk": flat,
            "mode": e.mode,
            "rayleigh_residual": e.rayleigh_residual,
            "clamp_residual": e.clamp_residual,
        }));
        betas.push((th, e.beta1));
    }
    betas.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in betas.windows(2) {
        checks.push(Check::ge(
            format!("strictly_decreasing[{}->{}]", w[0].0, w[1].0),
            w[0].1 - w[1].1,
            f64::MIN_POSITIVE,
        ));
    }
    let csv = cfg.out_dir.join("eigen.csv");
    write_csv(
        &csv,
        &["theta0", "beta1_discrete", "beta1_oracle", "rel_diff", "flat_disk", "mode", "oracle_ok"],
        rows.into_iter(),
    )?;
    Ok(Outcome {
        command: "eigen",
        checks,
        results: json!({ "table": table }),
        files: vec![csv],
        config: cfg.clone(),
    })
}

/// Immersion CSV, shadow-surface OBJ and field CSV for the generator.
pub fn cmd_export(cfg: &ExperimentConfig) -> Result<Outcome> {
    prepare_out_dir(&cfg.out_dir)?;
    let grid = grid_for(cfg)?;
    let generated = generate(cfg, &grid, &mut rng(cfg))?;
    let f = &generated.field;
    let imm = build_immersion(f);
    let shadow = shadow_surface(f);
    let paths = [
        cfg.out_dir.join("immersion.csv"),
        cfg.out_dir.join("shadow.obj"),
        cfg.out_dir.join("field.csv"),
    ];
    write_immersion_csv(&imm, &paths[0])?;
    write_shadow_obj(&shadow, &grid, &paths[1])?;
    write_field_csv(f, &paths[2])?;
    let mc = mean_curvature_residual(&imm).max;
    let mt = mt_residual(&imm).max;
    let mut checks = vec![Check::le(
        "vertex_count",
        (shadow.points.len() as f64 - (cfg.nr * cfg.ntheta) as f64).abs(),
        0.0,
    )];
    if generated.exact.is_some() {
        if let Some(mc) = mc {
            checks.push(Check::le("mean_curvature_residual", mc, cfg.mean_curvature_tolerance));
        }
    }
    Ok(Outcome {
        command: "export",
        checks,
        results: json!({
            "generator": generated.label,
            "vertices": shadow.points.len(),
            "degenerate_nodes": imm.degenerate_count(),
            "mean_curvature_residual_max": mc,
            "mt_residual_max": mt,
            "area": area(f),
        }),
        files: paths.to_vec(),
        config: cfg.clone(),
    })
}

/// One clamped solve with boundary data taken from the generator.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    prepare_out_dir(&cfg.out_dir)?;
    let grid = grid_for(cfg)?;
    let generated = generate(cfg, &grid, &mut rng(cfg))?;
    let bc = match &generated.exact {
        Some(exact) => ClampedBoundaryData::from_exact(exact, &grid),
        None => ClampedBoundaryData::from_field(&generated.field),
    };
    let sol = solve_el_clamped(&grid, &bc)?;
    let space = ClampedSpace::new(&grid);
    let weak = space.weak_el_residual(&sol.field)?;
    let diff = sol.field.axpy(-1.0, &generated.field)?;
    let l2 = |g: &ScalarField| integrate_bulk(&g.zip_with(g, |a, b| a * b).expect("same grid")).sqrt();
    let reference = l2(&generated.field);
    let rel_l2 = if reference > 0.0 { l2(&diff) / reference } else { l2(&diff) };
    let mut checks = vec![Check::le("weak_el_residual", weak, cfg.tolerances.el)];
    if generated.exact.is_some() {
        checks.push(Check::le("relative_l2_error", rel_l2, cfg.tolerances.quadrature));
    }
    let path = cfg.out_dir.join("solve_field.csv");
    write_field_csv(&sol.field, &path)?;
    Ok(Outcome {
        command: "solve",
        checks,
        results: json!({
            "generator": generated.label,
            "condition": sol.condition,
            "weak_el_residual": weak,
            "relative_l2_error_vs_generator": rel_l2,
            "max_error_vs_generator": diff.max_abs(),
            "area": area(&sol.field),
        }),
        files: vec![path],
        config: cfg.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleTable {
    /// Closed-form values of the holomorphic exact solution at the nodes.
    Exact,
    /// Shooting and flat-disk buckling values along the ladder.
    Buckling,
}

pub fn cmd_oracle(cfg: &ExperimentConfig, table: OracleTable) -> Result<Outcome> {
    prepare_out_dir(&cfg.out_dir)?;
    match table {
        OracleTable::Exact => {
            let grid = grid_for(cfg)?;
            let poly = super::generators::holomorphic_poly(cfg)?;
            let exact = q_from_holomorphic(&poly, cfg.part, grid.domain())?;
            let rows = grid.nodes().iter().map(|n| {
                let d = exact.chart_derivs(n.chart);
                vec![
                    fmt_f64(n.chart.u),
                    fmt_f64(n.chart.v),
                    fmt_f64(d.f),
                    fmt_f64(d.fu),
                    fmt_f64(d.fv),
                    fmt_f64(exact.hat_laplacian(n.chart)),
                    fmt_f64(exact.el_from_partials(n.chart)),
                ]
            });
            let path = cfg.out_dir.join("oracle_exact.csv");
            write_csv(&path, &["u", "v", "q", "q_u", "q_v", "hat_laplacian", "el_residual"], rows)?;
            let r = exact.residuals();
            Ok(Outcome {
                command: "oracle",
                checks: vec![Check::le("identities", r.laplacian.max(r.shifted).max(r.el), 1e-9)],
                results: json!({ "table": "exact", "residuals": r }),
                files: vec![path],
                config: cfg.clone(),
            })
        }
        OracleTable::Buckling => {
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for &th in &cfg.ladder {
                let shoot = cap_buckling_shooting(th)?;
                let flat = flat_disk_buckling(th)?;
                rows.push(vec![fmt_f64(th), fmt_f64(shoot), fmt_f64(flat)]);
                table.push(json!({ "theta0": th, "shooting": shoot, "flat_disk": flat }));
            }
            let path = cfg.out_dir.join("oracle_buckling.csv");
            write_csv(&path, &["theta0", "beta1_shooting", "flat_disk"], rows.into_iter())?;
            Ok(Outcome {
                command: "oracle",
                checks: Vec::new(),
                results: json!({ "table": "buckling", "rows": table, "j11": crate::oracle::j1_first_zero() }),
                files: vec![path],
                config: cfg.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            out_dir: dir.to_path_buf(),
            nr: 16,
            ntheta: 32,
            random_fields: 3,
            ..Default::default()
        }
    }

    #[test]
    fn verify_passes_and_fails_with_zero_tolerance() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path());
        assert!(cmd_verify(&c).unwrap().passed());
        let mut strict = c.clone();
        strict.tolerances.quadrature = 0.0;
        assert_eq!(cmd_verify(&strict).unwrap().exit_code(), EXIT_CHECK_FAILED);
    }

    #[test]
    fn theorem1_rejects_point_maps() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig {
            poly: vec![[1.0, 0.0]],
            ..cfg(dir.path())
        };
        let err = cmd_theorem1(&c).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }

    #[test]
    fn eigen_rejects_empty_ladder() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig {
            ladder: Vec::new(),
            ..cfg(dir.path())
        };
        assert_eq!(exit_code(&cmd_eigen(&c).unwrap_err()), EXIT_CONFIG);
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let c = ExperimentConfig {
            out_dir: blocker.join("sub"),
            ..cfg(dir.path())
        };
        assert_eq!(exit_code(&cmd_export(&c).unwrap_err()), EXIT_IO);
    }
}
