use serde_json::json;

use ptolemaic::comparison::ascat_defect;
use ptolemaic::cone::{boundary_metric, build_cone_at, busemann_approx, parse_heights, recovered_involution, ConePoint};
use ptolemaic::hyperbolicity::{apt_defect, gromov_delta, hyperbolicity_bound_from_apt, pt_kappa_defect};
use ptolemaic::metric::{validate, write_csv, SpaceDescriptor};
use ptolemaic::moebius::{crt, homothety_ratio, in_delta, involute, moebius_equivalent, ptolemy_defect, Homothety};
use ptolemaic::ExtendedMetricSpace;

use crate::args::{Certify, Command, Cone, ConeBase, Format, Global, Moebius, OtherSource, SpaceSource};
use crate::input::{generator, load, load_raw};
use crate::report::{Config, Report, Verdict};
use crate::CliError;

/// Default threshold of the exp-form asymptotic defect.
pub const APT_THRESHOLD: f64 = 4.0;
/// Entrywise bound for the recovered boundary involution.
pub const RECOVERY_TOL: f64 = 1e-12;

pub struct Outcome {
    pub report: Report,
    /// Primary file output of gen, cone build and moebius involute.
    pub artifact: Option<Vec<u8>>,
}

fn kappa_negative(g: &Global) -> Result<f64, CliError> {
    let k = g.kappa.unwrap_or(-1.0);
    if !(k < 0.0 && k.is_finite()) {
        return Err(CliError::Usage(format!("this command needs --kappa < 0, got {k}")));
    }
    Ok(k)
}

fn push(report: &mut Report, name: &str, value: f64, threshold: f64, pass: bool) {
    report.pass &= pass;
    report.verdicts.push(Verdict { name: name.into(), value, threshold, pass });
}

fn space_bytes(space: &ExtendedMetricSpace, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Json => serde_json::to_writer_pretty(&mut buf, &SpaceDescriptor::from_space(space))?,
        Format::Csv => write_csv(space, &mut buf)?,
    }
    Ok(buf)
}

fn load_other(o: &OtherSource, seed: Option<u64>) -> Result<(ExtendedMetricSpace, crate::report::InputInfo), CliError> {
    let src = SpaceSource { input: o.with.clone(), gen: o.with_gen.clone() };
    load(&src, seed)
}

pub fn run(command: &Command, g: &Global) -> Result<Outcome, CliError> {
    let config = Config { kappa: g.kappa, seed: g.seed, tolerance: g.tolerance };
    match command {
        Command::Validate(src) => {
            let mut report = Report::new("validate", config);
            let (space, info) = load_raw(src.input.as_deref(), src.gen.as_deref(), g.seed)?;
            report.inputs.push(info);
            let v = validate(&space);
            report.set_results(json!({ "validation": v }));
            push(&mut report, "violations", v.violations.len() as f64, 0.0, v.ok);
            Ok(Outcome { report, artifact: None })
        }
        Command::Certify(c) => certify(c, g, config),
        Command::Moebius(m) => moebius(m, g, config),
        Command::Cone(c) => cone(c, g, config),
        Command::Gen { spec } => {
            let mut report = Report::new("gen", config);
            let gen = generator(spec, g.seed)?;
            let space = gen.build()?;
            report.inputs.push(crate::report::InputInfo::new(format!("gen:{spec}"), &space));
            report.set_results(json!({ "generator": gen, "points": space.n() }));
            let artifact = space_bytes(&space, g.format)?;
            Ok(Outcome { report, artifact: Some(artifact) })
        }
    }
}

fn certify(c: &Certify, g: &Global, config: Config) -> Result<Outcome, CliError> {
    let (name, src) = match c {
        Certify::Ptolemy(s) => ("certify ptolemy", s),
        Certify::Ptk(s) => ("certify ptk", s),
        Certify::Apt(s) => ("certify apt", s),
        Certify::Gromov(s) => ("certify gromov", s),
        Certify::Ascat(s) => ("certify ascat", s),
    };
    let mut report = Report::new(name, config);
    let (space, info) = load(src, g.seed)?;
    report.inputs.push(info);
    match c {
        Certify::Ptolemy(_) => {
            let cert = ptolemy_defect(&space)?;
            report.check("ptolemy_defect", cert.defect, g.threshold.unwrap_or(0.0));
            report.set_results(json!({ "ptolemy": cert }));
        }
        Certify::Ptk(_) => {
            let kappa = g.kappa.ok_or_else(|| CliError::Usage("certify ptk needs --kappa".into()))?;
            let cert = pt_kappa_defect(&space, kappa)?;
            report.check("pt_kappa_defect", cert.defect, g.threshold.unwrap_or(0.0));
            report.set_results(json!({ "kappa": kappa, "pt_kappa": cert }));
        }
        Certify::Apt(_) => {
            let kappa = kappa_negative(g)?;
            let cert = apt_defect(&space, kappa)?;
            report.check("exp_defect", cert.exp_defect, g.threshold.unwrap_or(APT_THRESHOLD));
            let bound = (kappa == -1.0).then(|| hyperbolicity_bound_from_apt(cert.exp_defect));
            report.set_results(json!({ "apt": cert, "hyperbolicity_bound": bound }));
        }
        Certify::Gromov(_) => {
            let cert = gromov_delta(&space);
            let apt = if space.finite_indices().len() >= 4 { Some(apt_defect(&space, -1.0)?) } else { None };
            let bound = hyperbolicity_bound_from_apt(apt.as_ref().map_or(0.0, |a| a.exp_defect));
            report.check("delta", cert.defect, g.threshold.unwrap_or(bound));
            report.set_results(json!({
                "gromov": cert,
                "apt_exp_defect": apt.map(|a| a.exp_defect),
                "bound_from_apt": bound,
            }));
        }
        Certify::Ascat(_) => {
            let kappa = kappa_negative(g)?;
            let cert = ascat_defect(&space, kappa)?;
            report.check("ascat_defect", cert.defect, g.threshold.unwrap_or(0.0));
            report.set_results(json!({ "ascat": cert }));
        }
    }
    Ok(Outcome { report, artifact: None })
}

fn moebius(m: &Moebius, g: &Global, config: Config) -> Result<Outcome, CliError> {
    match m {
        Moebius::Crt { space: src, quad } => {
            let mut report = Report::new("moebius crt", config);
            let (space, info) = load(src, g.seed)?;
            report.inputs.push(info);
            let q: [usize; 4] = quad.as_slice().try_into().map_err(|_| CliError::Usage("--quad needs four indices".into()))?;
            let t = crt(&space, q)?;
            report.set_results(json!({ "quad": q, "crt": t, "in_delta": in_delta(&t) }));
            Ok(Outcome { report, artifact: None })
        }
        Moebius::Equivalent { space: src, other } => {
            let mut report = Report::new("moebius equivalent", config);
            let (a, ia) = load(src, g.seed)?;
            let (b, ib) = load_other(other, g.seed)?;
            report.inputs.extend([ia, ib]);
            let e = moebius_equivalent(&a, &b)?;
            push(&mut report, "crt_discrepancy", e.max_discrepancy, ptolemaic::moebius::EQUIVALENCE_TOL, e.equivalent);
            report.set_results(json!({ "equivalence": e }));
            Ok(Outcome { report, artifact: None })
        }
        Moebius::Involute { space: src, at } => {
            let mut report = Report::new("moebius involute", config);
            let (space, info) = load(src, g.seed)?;
            report.inputs.push(info);
            let inv = involute(&space, *at)?;
            push(&mut report, "violations", inv.report.violations.len() as f64, 0.0, inv.report.ok);
            report.set_results(json!({ "at": at, "validation": inv.report }));
            let artifact = space_bytes(&inv.space, g.format)?;
            Ok(Outcome { report, artifact: Some(artifact) })
        }
        Moebius::Homothety { space: src, other } => {
            let mut report = Report::new("moebius homothety", config);
            let (a, ia) = load(src, g.seed)?;
            let (b, ib) = load_other(other, g.seed)?;
            report.inputs.extend([ia, ib]);
            let h = homothety_ratio(&a, &b)?;
            let (value, pass) = match &h {
                Homothety::Ratio { lambda } => (*lambda, true),
                Homothety::Mismatch { ratio, .. } => (*ratio, false),
            };
            push(&mut report, "homothety", value, ptolemaic::moebius::HOMOTHETY_TOL, pass);
            report.set_results(json!({ "homothety": h }));
            Ok(Outcome { report, artifact: None })
        }
    }
}

fn cone(c: &Cone, g: &Global, config: Config) -> Result<Outcome, CliError> {
    let base_of = |b: &ConeBase| load(&b.space, g.seed);
    match c {
        Cone::Build { base, heights, truncate } => {
            let mut report = Report::new("cone build", config);
            let (z, info) = base_of(base)?;
            report.inputs.push(info);
            let hs = parse_heights(heights, z.diameter())?;
            let cone = build_cone_at(&z, &hs, *truncate, base.z0)?;
            let space = cone.to_space();
            let v = validate(&space);
            push(&mut report, "violations", v.violations.len() as f64, 0.0, v.ok);
            let levels: Vec<f64> = cone.points().iter().step_by(z.n()).map(|p| p.height).collect();
            report.set_results(json!({
                "points": cone.len(),
                "heights": levels,
                "z0": cone.z0(),
                "truncated": cone.is_truncated(),
            }));
            let artifact = match g.format {
                Format::Json => serde_json::to_vec_pretty(&cone.export())?,
                Format::Csv => space_bytes(&space, Format::Csv)?,
            };
            Ok(Outcome { report, artifact: Some(artifact) })
        }
        Cone::Boundary { base } => {
            let mut report = Report::new("cone boundary", config);
            let (z, info) = base_of(base)?;
            report.inputs.push(info);
            let b = boundary_metric(&z, base.z0)?;
            let rec = recovered_involution(&z, base.z0)?;
            let mut err = 0.0f64;
            for i in 0..z.n() {
                for j in 0..z.n() {
                    err = err.max((rec.d(i, j) - z.d(i, j)).abs());
                }
            }
            let v = validate(&b.rho);
            push(&mut report, "boundary_violations", v.violations.len() as f64, 0.0, v.ok);
            let ptolemy = if b.rho.n() >= 4 { Some(ptolemy_defect(&b.rho)?) } else { None };
            if let Some(p) = &ptolemy {
                report.check("boundary_ptolemy_defect", p.defect, g.threshold.unwrap_or(0.0));
            }
            push(&mut report, "recovery_error", err, RECOVERY_TOL, err <= RECOVERY_TOL);
            push(&mut report, "gaps_monotone", if b.monotone { 1.0 } else { 0.0 }, 1.0, b.monotone);
            report.set_results(json!({
                "boundary": b,
                "boundary_ptolemy": ptolemy,
                "recovery_error": err,
            }));
            Ok(Outcome { report, artifact: None })
        }
        Cone::Busemann { base, point, height, i_max } => {
            let mut report = Report::new("cone busemann", config);
            let (z, info) = base_of(base)?;
            report.inputs.push(info);
            let cone = build_cone_at(&z, &[1.0], false, base.z0)?;
            let b = busemann_approx(ConePoint::new(*point, *height), &cone, *i_max)?;
            report.check("discrepancy", b.discrepancy, b.tail_residual);
            report.set_results(json!({ "busemann": b }));
            Ok(Outcome { report, artifact: None })
        }
    }
}
