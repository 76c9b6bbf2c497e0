use std::path::Path;

use hartree_core::params::{classify_existence, classify_regularity, decay_case};
use hartree_core::ProblemParams;

use crate::config::RunConfig;
use crate::exit;

/// `start:end:count`, endpoints included; `count = 1` gives `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + i as f64 * step)
            .collect()
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected start:end:count, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let (start, end) = (num(a)?, num(b)?);
    let count: usize = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
    if !start.is_finite() || !end.is_finite() || count == 0 {
        return Err(format!("bad range {s:?}"));
    }
    Ok(Range { start, end, count })
}

/// Parses `"p0:p1:n,q0:q1:m"`.
pub fn parse_grid(s: &str) -> Result<(Range, Range), String> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two ranges, got {s:?}"))?;
    Ok((parse_range(p)?, parse_range(q)?))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Row {
    pub p: f64,
    pub q: f64,
    pub existence_class: String,
    pub regularity_region: String,
    pub r_bar: Option<f64>,
    pub h_bar: Option<f64>,
    pub decay_case_u: String,
    pub decay_case_v: String,
}

pub fn classify(n: usize, alpha: f64, p: f64, q: f64) -> Result<Row, String> {
    let params = ProblemParams::new(n, alpha, p, q).map_err(|e| e.to_string())?;
    let reg = classify_regularity(&params).ok();
    let decay = decay_case(&params);
    Ok(Row {
        p,
        q,
        existence_class: classify_existence(&params).tag.to_string(),
        regularity_region: reg.map(|r| r.region.to_string()).unwrap_or_default(),
        r_bar: reg.map(|r| r.r_bar),
        h_bar: reg.map(|r| r.h_bar),
        decay_case_u: decay.u.kind.as_str().into(),
        decay_case_v: decay.v.kind.as_str().into(),
    })
}

pub fn run(config_path: &Path, grid: &str, out: &Path) -> i32 {
    let cfg = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e @ crate::config::ConfigError::Missing { .. }) => {
            eprintln!("error: {e}");
            return exit::NO_INPUT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::USAGE;
        }
    };
    let (pr, qr) = match parse_grid(grid) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: --grid-pq: {e}");
            return exit::USAGE;
        }
    };
    let mut rows = Vec::with_capacity(pr.count * qr.count);
    for p in pr.values() {
        for q in qr.values() {
            match classify(cfg.params.n, cfg.params.alpha, p, q) {
                Ok(row) => rows.push(row),
                Err(e) => {
                    eprintln!("error: (p, q) = ({p}, {q}): {e}");
                    return exit::USAGE;
                }
            }
        }
    }
    let written = std::fs::create_dir_all(out)
        .map_err(csv::Error::from)
        .and_then(|_| {
            let mut w = csv::Writer::from_path(out.join("regions.csv"))?;
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(())
        });
    if let Err(e) = written {
        eprintln!("error: writing {}: {e}", out.display());
        return exit::FAILED;
    }
    eprintln!(
        "{} rows written to {}",
        rows.len(),
        out.join("regions.csv").display()
    );
    exit::OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges() {
        let (p, q) = parse_grid("1.05:6:100,2:2:1").unwrap();
        assert_eq!(p.values().len(), 100);
        assert_eq!(p.values()[0], 1.05);
        assert!((p.values()[99] - 6.0).abs() < 1e-12);
        assert_eq!(q.values(), vec![2.0]);
    }

    #[test]
    fn rejects_malformed_ranges() {
        for bad in [
            "1:2:3",
            "1:2,3:4:5",
            "a:2:3,1:2:3",
            "1:2:0,1:2:3",
            "1:2:3:4,1:2:3",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
