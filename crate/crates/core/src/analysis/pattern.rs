use super::{AnalysisError, Result};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Abscissa {
    AngleDeg,
    FreqGhz,
}

impl Abscissa {
    pub fn column(self) -> &'static str {
        match self {
            Abscissa::AngleDeg => "angle_deg",
            Abscissa::FreqGhz => "freq_GHz",
        }
    }
}

/// Echo width curve in dB(m). `meta` holds free-form `key=value` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsPattern {
    pub abscissa: Abscissa,
    pub x: Vec<f64>,
    pub sigma_db: Vec<f64>,
    pub meta: Vec<(String, String)>,
}

impl RcsPattern {
    pub fn new(abscissa: Abscissa, x: Vec<f64>, sigma_db: Vec<f64>) -> Result<Self> {
        if x.len() != sigma_db.len() {
            return Err(AnalysisError::Usage(format!("{} abscissae but {} values", x.len(), sigma_db.len())));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AnalysisError::Usage("abscissae must be strictly increasing".into()));
        }
        if let Some(i) = sigma_db.iter().position(|s| !s.is_finite()) {
            return Err(AnalysisError::Usage(format!("non-finite echo width at index {i}")));
        }
        Ok(Self { abscissa, x, sigma_db, meta: Vec::new() })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{},sigma_dBm", self.abscissa.column())?;
        for (x, s) in self.x.iter().zip(&self.sigma_db) {
            writeln!(w, "{x},{s:.12e}")?;
        }
        Ok(())
    }
}

pub fn read_rcs_csv<R: BufRead>(r: R) -> Result<RcsPattern> {
    let mut meta = Vec::new();
    let mut abscissa = None;
    let (mut x, mut s) = (Vec::new(), Vec::new());
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if abscissa.is_none() {
            abscissa = Some(match line {
                "angle_deg,sigma_dBm" => Abscissa::AngleDeg,
                "freq_GHz,sigma_dBm" => Abscissa::FreqGhz,
                other => return Err(AnalysisError::Parse(format!("unexpected header '{other}'"))),
            });
            continue;
        }
        let bad = || AnalysisError::Parse(format!("line {}: '{line}'", lineno + 1));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        x.push(a.trim().parse::<f64>().map_err(|_| bad())?);
        s.push(b.trim().parse::<f64>().map_err(|_| bad())?);
    }
    let abscissa = abscissa.ok_or_else(|| AnalysisError::Parse("missing header".into()))?;
    let mut p = RcsPattern::new(abscissa, x, s)?;
    p.meta = meta;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcsComparison {
    pub max_abs_db: f64,
    pub mean_abs_db: f64,
    /// `|a − b|` per abscissa, in dB.
    pub diffs_db: Vec<f64>,
}

impl RcsComparison {
    /// Share of points whose difference is at most `threshold_db`.
    pub fn fraction_within(&self, threshold_db: f64) -> f64 {
        if self.diffs_db.is_empty() {
            return 1.0;
        }
        self.diffs_db.iter().filter(|&&d| d <= threshold_db).count() as f64 / self.diffs_db.len() as f64
    }
}

pub fn compare_rcs(a: &RcsPattern, b: &RcsPattern) -> Result<RcsComparison> {
    if a.abscissa != b.abscissa || a.x.len() != b.x.len() {
        return Err(AnalysisError::GridMismatch(format!("{} vs {} points", a.x.len(), b.x.len())));
    }
    if let Some(i) = a.x.iter().zip(&b.x).position(|(p, q)| (p - q).abs() > 1e-9 * (1.0 + p.abs())) {
        return Err(AnalysisError::GridMismatch(format!("abscissa {i}: {} vs {}", a.x[i], b.x[i])));
    }
    let diffs_db: Vec<f64> = a.sigma_db.iter().zip(&b.sigma_db).map(|(p, q)| (p - q).abs()).collect();
    let max_abs_db = diffs_db.iter().copied().fold(0.0, f64::max);
    let mean_abs_db = if diffs_db.is_empty() { 0.0 } else { diffs_db.iter().sum::<f64>() / diffs_db.len() as f64 };
    Ok(RcsComparison { max_abs_db, mean_abs_db, diffs_db })
}
