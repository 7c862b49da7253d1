use hoibc::analysis::{
    compare_rcs, monostatic_sweep, read_rcs_csv, series_coated_cylinder, series_coefficients, solve_bistatic, to_db, Abscissa,
    GeometrySpec, RcsPattern, SeriesMode, SeriesSolutionSpec, SolverSetup, Sweep,
};
use hoibc::assembly::SurfaceCurrents;
use hoibc::impedance::{
    default_tolerance, fit_coefficients, impedance_table, suc_check_ibc1, suc_check_ibc2, wellposedness_check, write_impedance_csv,
    ClauseStatus, FitMethod, IbcCoefficients, IbcOrder, Polarization, SucReport,
};
use hoibc::specfun::C0;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{RunConfig, SweepSpec};
use crate::error::CliError;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Files produced by a command, written only after every computation succeeded.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn commit(self, quiet: bool) -> Result<(), CliError> {
        for (path, bytes) in &self.files {
            write_atomic(path, bytes)?;
            if !quiet {
                println!("wrote {}", path.display());
            }
        }
        Ok(())
    }
}

fn pol_tag(pol: Polarization) -> &'static str {
    match pol {
        Polarization::Te => "te",
        Polarization::Tm => "tm",
    }
}

fn nodes_for(cfg: &RunConfig, order: IbcOrder) -> Option<&[f64]> {
    cfg.collocation_deg.as_deref().filter(|n| n.len() == order.aux_fields())
}

fn pattern_bytes(p: &RcsPattern) -> Vec<u8> {
    let mut buf = Vec::new();
    p.write_csv(&mut buf).expect("writing to memory");
    buf
}

pub fn impedance_table_cmd(cfg: &RunConfig, out: &Path) -> Result<Outputs, CliError> {
    let mut outputs = Outputs::default();
    for &pol in &cfg.pols {
        let fit = |order| fit_coefficients(&cfg.coating, pol, cfg.k0, order, cfg.fit, nodes_for(cfg, order));
        let (f0, f1, f2) = (fit(IbcOrder::Ibc0)?, fit(IbcOrder::Ibc1)?, fit(IbcOrder::Ibc2)?);
        let rows = impedance_table(&cfg.coating, pol, cfg.k0, &cfg.table_deg, [&f0, &f1, &f2])?;
        let worst = |sel: fn(&hoibc::impedance::ImpedanceRow) -> num_complex::Complex64| {
            rows.iter().map(|r| (sel(r) - r.exact).norm()).fold(0.0, f64::max)
        };
        log::info!(
            "{}: max |Z - Zex| ibc0 {:.4} ohm, ibc1 {:.4} ohm, ibc2 {:.4} ohm",
            pol.name(),
            worst(|r| r.ibc0),
            worst(|r| r.ibc1),
            worst(|r| r.ibc2)
        );
        let mut buf = Vec::new();
        write_impedance_csv(&mut buf, &rows).expect("writing to memory");
        outputs.add(out.join(format!("impedance_{}.csv", pol_tag(pol))), buf);
    }
    Ok(outputs)
}

fn not_applicable(mut r: SucReport) -> SucReport {
    for c in r.clauses.iter_mut().filter(|c| !c.name.starts_with("Im(")) {
        c.status = ClauseStatus::NotApplicable;
        c.lhs = 0.0;
    }
    r.passed = r.clauses.iter().all(|c| c.status != ClauseStatus::Fail);
    r
}

/// SUC and well-posedness reports for one coefficient set (physical form).
pub fn check_report(c: &IbcCoefficients) -> Result<(SucReport, Option<SucReport>), CliError> {
    let tol = default_tolerance(c);
    Ok(match c.order {
        IbcOrder::Ibc0 => {
            let probe = IbcCoefficients { order: IbcOrder::Ibc1, ..*c };
            (not_applicable(suc_check_ibc1(&probe, tol)?), None)
        }
        IbcOrder::Ibc1 => (suc_check_ibc1(c, tol)?, Some(wellposedness_check(c, tol)?)),
        IbcOrder::Ibc2 => (suc_check_ibc2(c, tol)?, Some(wellposedness_check(c, tol)?)),
    })
}

fn coefficients_for(cfg: &RunConfig, pol: Polarization) -> Result<IbcCoefficients, CliError> {
    match cfg.coefficients {
        Some(c) => Ok(c),
        None => Ok(fit_coefficients(&cfg.coating, pol, cfg.k0, cfg.order, cfg.fit, cfg.collocation_deg.as_deref())?.physical()),
    }
}

fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{:e}{:+e}i", z.re, z.im)
}

pub fn check_cmd(cfg: &RunConfig, out: Option<&Path>) -> Result<(String, Outputs), CliError> {
    let pols: Vec<Polarization> = match cfg.coefficients {
        Some(c) => vec![c.pol],
        None => cfg.pols.clone(),
    };
    let mut text = String::new();
    let mut outputs = Outputs::default();
    for pol in pols {
        let c = coefficients_for(cfg, pol)?;
        let (suc, wp) = check_report(&c)?;
        let verdict = |r: &SucReport| if r.passed { "PASS" } else { "FAIL" };
        let mut block = format!("{} {:?}: SUC {}", pol.name(), c.order, verdict(&suc));
        if let Some(w) = &wp {
            block += &format!(", well-posedness {}", verdict(w));
        }
        block += "\n";
        let p = format!("{}.", pol_tag(pol));
        block += &format!("{p}order=ibc{}\n", c.order.index());
        for (k, v) in [("a0", c.a0), ("a", c.a), ("b", c.b), ("a_prime", c.a_prime), ("b_prime", c.b_prime)] {
            block += &format!("{p}{k}={}\n", fmt_c(v));
        }
        block += &suc.to_key_values(&format!("{p}suc."));
        match &wp {
            Some(w) => block += &w.to_key_values(&format!("{p}wellposed.")),
            None => block += &format!("{p}wellposed=n/a\n"),
        }
        if let Some(dir) = out {
            outputs.add(dir.join(format!("check_ibc{}_{}.txt", c.order.index(), pol_tag(pol))), block.clone().into_bytes());
        }
        text += &block;
    }
    Ok((text, outputs))
}

fn setup(cfg: &RunConfig, pol: Polarization) -> Result<SolverSetup, CliError> {
    let geometry = cfg.geometry.clone().ok_or_else(|| CliError::validation("geometry: required by solve"))?;
    if cfg.coefficients.is_some() {
        return Err(CliError::validation("ibc.coefficients: only used by check; solve fits coefficients per frequency"));
    }
    Ok(SolverSetup {
        geometry,
        coating: cfg.coating,
        pol,
        order: cfg.order,
        fit: cfg.fit,
        collocation_deg: cfg.collocation_deg.clone(),
        assembly: cfg.assembly,
    })
}

fn currents_bytes(c: &SurfaceCurrents, meta: &[(String, String)]) -> Vec<u8> {
    let mut s = String::new();
    for (k, v) in meta {
        s += &format!("# {k}={v}\n");
    }
    s += "field,index,re,im\n";
    let mut emit = |name: &str, v: &[num_complex::Complex64]| {
        for (i, z) in v.iter().enumerate() {
            s += &format!("{name},{i},{:e},{:e}\n", z.re, z.im);
        }
    };
    emit("J", &c.j);
    emit("M", &c.m);
    for (n, a) in c.aux.iter().enumerate() {
        emit(&format!("aux{n}"), a);
    }
    s.into_bytes()
}

fn sweep_for(cfg: &RunConfig, s: &SweepSpec) -> Sweep {
    match s {
        SweepSpec::Angles(v) => Sweep::Angles { k0: cfg.k0, phi_inc_deg: v.clone() },
        SweepSpec::Frequencies { freqs_hz, phi_inc_deg } => Sweep::Frequencies { freqs_hz: freqs_hz.clone(), phi_inc_deg: *phi_inc_deg },
    }
}

pub fn solve_cmd(cfg: &RunConfig, out: &Path) -> Result<Outputs, CliError> {
    let mut outputs = Outputs::default();
    let tag = format!("ibc{}", cfg.order.index());
    for &pol in &cfg.pols {
        let s = setup(cfg, pol)?;
        if cfg.order != IbcOrder::Ibc0 {
            let (suc, _) = check_report(&s.coefficients(cfg.k0)?.physical())?;
            if !suc.passed {
                let failed: Vec<&str> = suc.clauses.iter().filter(|c| c.status == ClauseStatus::Fail).map(|c| c.name.as_str()).collect();
                log::warn!("{}: fitted coefficients fail SUC clauses {failed:?}; solving anyway", pol.name());
            }
        }
        let t0 = Instant::now();
        match &cfg.sweep {
            Some(sw) => {
                let p = monostatic_sweep(&s, &sweep_for(cfg, sw))?;
                log::info!("{} {tag}: monostatic sweep of {} points in {:.2?}", pol.name(), p.len(), t0.elapsed());
                outputs.add(out.join(format!("monostatic_{tag}_{}.csv", pol_tag(pol))), pattern_bytes(&p));
            }
            None => {
                let r = solve_bistatic(&s, cfg.k0, cfg.incidence_deg, &cfg.angles_deg)?;
                log::info!("{} {tag}: rcond {:.3e}, solved in {:.2?}", pol.name(), r.rcond, t0.elapsed());
                outputs.add(out.join(format!("currents_{tag}_{}.csv", pol_tag(pol))), currents_bytes(&r.currents, &r.pattern.meta));
                outputs.add(out.join(format!("rcs_{tag}_{}.csv", pol_tag(pol))), pattern_bytes(&r.pattern));
            }
        }
    }
    Ok(outputs)
}

fn series_spec(cfg: &RunConfig, k0: f64) -> Result<SeriesSolutionSpec, CliError> {
    let a = match (cfg.inner_radius, &cfg.geometry) {
        (Some(a), _) => a,
        (None, Some(GeometrySpec::Circle { radius, .. })) => radius - cfg.coating.thickness,
        _ => return Err(CliError::validation("oracle.inner_radius: required unless geometry is a circle")),
    };
    if a <= 0.0 {
        return Err(CliError::validation("oracle: inner radius must be positive"));
    }
    Ok(SeriesSolutionSpec { n_max: cfg.n_max, ..SeriesSolutionSpec::new(a, &cfg.coating, k0) })
}

pub fn oracle_cmd(cfg: &RunConfig, out: &Path) -> Result<Outputs, CliError> {
    let mut outputs = Outputs::default();
    for &pol in &cfg.pols {
        let (name, pattern) = match &cfg.sweep {
            None => {
                let spec = series_spec(cfg, cfg.k0)?;
                ("oracle", series_coated_cylinder(&spec, pol, &cfg.angles_deg, cfg.incidence_deg, SeriesMode::Bistatic)?)
            }
            Some(SweepSpec::Angles(phis)) => {
                let spec = series_spec(cfg, cfg.k0)?;
                ("oracle_monostatic", series_coated_cylinder(&spec, pol, phis, 0.0, SeriesMode::Monostatic)?)
            }
            Some(SweepSpec::Frequencies { freqs_hz, .. }) => {
                let mut sigma = Vec::with_capacity(freqs_hz.len());
                let mut worst_tail: f64 = 0.0;
                for &f in freqs_hz {
                    let sc = series_coefficients(&series_spec(cfg, 2.0 * PI * f / C0)?, pol)?;
                    worst_tail = worst_tail.max(sc.tail);
                    sigma.push(to_db(sc.sigma(PI)));
                }
                let spec = series_spec(cfg, cfg.k0)?;
                let p = RcsPattern::new(Abscissa::FreqGhz, freqs_hz.iter().map(|f| f * 1e-9).collect(), sigma)?
                    .with_meta("source", "exact")
                    .with_meta("pol", pol.name())
                    .with_meta("inner_radius", spec.a)
                    .with_meta("thickness", spec.d)
                    .with_meta("tail_ratio", format!("{worst_tail:.3e}"));
                ("oracle_monostatic", p)
            }
        };
        outputs.add(out.join(format!("{name}_{}.csv", pol_tag(pol))), pattern_bytes(&pattern));
    }
    Ok(outputs)
}

fn read_pattern(path: &Path) -> Result<RcsPattern, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    read_rcs_csv(std::io::BufReader::new(f)).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Report text, and whether `max_abs_dB <= threshold`.
pub fn compare_cmd(a: &Path, b: &Path, threshold_db: f64) -> Result<(String, bool), CliError> {
    if !(threshold_db >= 0.0) {
        return Err(CliError::validation("threshold: must be non-negative"));
    }
    let cmp = compare_rcs(&read_pattern(a)?, &read_pattern(b)?)?;
    let pass = cmp.max_abs_db <= threshold_db;
    let text = format!(
        "max_abs_dB={:e}\nmean_abs_dB={:e}\nfraction_within_threshold={}\nthreshold_dB={}\nresult={}\n",
        cmp.max_abs_db,
        cmp.mean_abs_db,
        cmp.fraction_within(threshold_db),
        threshold_db,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok((text, pass))
}

pub fn parse_fit(s: &str) -> Result<FitMethod, String> {
    match s {
        "taylor" => Ok(FitMethod::Taylor),
        "pade" => Ok(FitMethod::Pade),
        "collocation" => Ok(FitMethod::Collocation),
        _ => Err(format!("unknown fit method {s:?} (taylor, pade, collocation)")),
    }
}
