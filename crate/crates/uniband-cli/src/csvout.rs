//! Fixed-format CSV emission for regret curves, plus a validator that the
//! emitted text round-trips through. Dot decimal separator, `\n` newlines,
//! nine digits after the decimal point, no trailing whitespace.

use std::fmt::Write as _;

use uniband::montecarlo::RegretCurve;

use crate::scenario::parse_policy;

pub const HEADER: &str = "policy,n,mean_regret,stderr,reps";

pub fn regret_csv(curves: &[RegretCurve]) -> String {
    let mut out =
        String::with_capacity(64 * (1 + curves.iter().map(|c| c.points.len()).sum::<usize>()));
    out.push_str(HEADER);
    out.push('\n');
    for curve in curves {
        for pt in &curve.points {
            let _ = writeln!(
                out,
                "{},{},{:.9},{:.9},{}",
                curve.policy.kind().name(),
                pt.n,
                pt.mean_regret,
                pt.stderr,
                pt.reps
            );
        }
    }
    out
}

/// Check an emitted CSV: header, field shapes, nine-digit decimals, policy
/// names that parse, strictly increasing n per policy block, and clean line
/// endings.
pub fn validate_regret_csv(text: &str) -> Result<(), String> {
    if !text.ends_with('\n') {
        return Err("missing trailing newline".into());
    }
    if text.contains('\r') {
        return Err("carriage returns are not part of the format".into());
    }
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        Some(h) => return Err(format!("bad header {h:?}")),
        None => return Err("empty file".into()),
    }
    let mut rows = 0usize;
    let mut block: Option<(String, u64)> = None;
    for (idx, line) in lines.enumerate() {
        let row = idx + 2;
        if line != line.trim_end() {
            return Err(format!("row {row}: trailing whitespace"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format!(
                "row {row}: expected 5 fields, got {}",
                fields.len()
            ));
        }
        parse_policy(fields[0]).map_err(|e| format!("row {row}: {e}"))?;
        let n: u64 = fields[1]
            .parse()
            .map_err(|_| format!("row {row}: bad n {:?}", fields[1]))?;
        for (name, raw) in [("mean_regret", fields[2]), ("stderr", fields[3])] {
            let digits = raw.split_once('.').map(|(_, d)| d.len());
            if digits != Some(9) {
                return Err(format!(
                    "row {row}: {name} {raw:?} is not a 9-digit decimal"
                ));
            }
            let v: f64 = raw
                .parse()
                .map_err(|_| format!("row {row}: bad {name} {raw:?}"))?;
            if !v.is_finite() {
                return Err(format!("row {row}: {name} is not finite"));
            }
        }
        fields[4]
            .parse::<u64>()
            .map_err(|_| format!("row {row}: bad reps {:?}", fields[4]))?;
        match &mut block {
            Some((policy, prev_n)) if policy == fields[0] => {
                if n <= *prev_n {
                    return Err(format!("row {row}: n not increasing within {policy}"));
                }
                *prev_n = n;
            }
            _ => block = Some((fields[0].to_string(), n)),
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("no data rows".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use uniband::montecarlo::RegretPoint;
    use uniband::policy::{PolicyKind, PolicySpec};

    fn curve() -> RegretCurve {
        RegretCurve {
            policy: PolicySpec::new(PolicyKind::UcbUniform),
            points: vec![
                RegretPoint {
                    n: 10,
                    mean_regret: 1.25,
                    stderr: 0.5,
                    reps: 4,
                },
                RegretPoint {
                    n: 100,
                    mean_regret: 2.0,
                    stderr: 0.25,
                    reps: 4,
                },
            ],
        }
    }

    #[test]
    fn emits_fixed_format() {
        let csv = regret_csv(&[curve()]);
        assert_eq!(
            csv,
            "policy,n,mean_regret,stderr,reps\n\
             ucb-uniform,10,1.250000000,0.500000000,4\n\
             ucb-uniform,100,2.000000000,0.250000000,4\n"
        );
        validate_regret_csv(&csv).unwrap();
    }

    #[test]
    fn validator_rejects_malformed_rows() {
        let csv = regret_csv(&[curve()]);
        assert!(validate_regret_csv(&csv.replace("stderr", "sd")).is_err());
        assert!(validate_regret_csv(&csv.replace("1.250000000", "1.25")).is_err());
        assert!(validate_regret_csv(&csv.replace("ucb-uniform,100", "ucb-uniform,10")).is_err());
        assert!(validate_regret_csv(&csv.replace("\n", "\r\n")).is_err());
        assert!(validate_regret_csv(csv.trim_end()).is_err());
        assert!(validate_regret_csv("policy,n,mean_regret,stderr,reps\n").is_err());
    }
}
