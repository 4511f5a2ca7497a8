//! String ids for signals, spatial profiles and translation ladders.
//!
//! Signals: `bump`, `beta[:n]`, `a`, `b`, `b+a`, `sin[:ω]`, `const:c`,
//! `zero`, `sampled:<path>` (CSV with a header and columns `t,value`).
//!
//! Profiles on `[0, L]`: `zero`, `sin[:k]` for `sin(kπξ/L)`,
//! `modes:a₁,a₂,…` for `Σ a_k sin(kπξ/L)`, `const:c` (projected onto the
//! retained modes).
//!
//! Ladders: `pow3[:first-last]` for `2·3^m`, `sqrt2[:count]`, `int[:count]`
//! for `1, 2, …`, `list:s₁,s₂,…`.

use std::path::Path;

use aalab_core::aa_signals::{
    pow3_ladder, sqrt2_ladder, SampledSignal, SignalKind, UnboundedAASpec,
};
use aalab_core::spectral_heat::{Field, SpectralBasis};
use anyhow::{anyhow, bail, Context, Result};

fn number(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("{what}: `{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("{what}: `{s}` is not finite");
    }
    Ok(v)
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| number(x, what)).collect()
}

fn count(s: &str, what: &str) -> Result<u32> {
    s.trim()
        .parse()
        .with_context(|| format!("{what}: `{s}` is not a positive integer"))
}

pub fn parse_signal(id: &str, spec: UnboundedAASpec) -> Result<SignalKind> {
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    Ok(match (head, arg) {
        ("bump", None) => SignalKind::Bump(spec.bump),
        ("beta", None) => SignalKind::Beta {
            level: 1,
            bump: spec.bump,
        },
        ("beta", Some(n)) => {
            let level = count(n, "beta level")?;
            if level == 0 {
                bail!("beta levels start at 1");
            }
            SignalKind::Beta {
                level,
                bump: spec.bump,
            }
        }
        ("a", None) => SignalKind::Unbounded(spec),
        ("b", None) => SignalKind::Resonant,
        ("b+a", None) => SignalKind::resonant_plus_unbounded(spec),
        ("sin", None) => SignalKind::unit_sine(),
        ("sin", Some(w)) => SignalKind::Sine {
            omega: number(w, "sin frequency")?,
        },
        ("const", Some(c)) => SignalKind::Const(number(c, "constant")?),
        ("zero", None) => SignalKind::Const(0.0),
        ("sampled", Some(path)) => SignalKind::Sampled(read_sampled(Path::new(path))?),
        _ => bail!("unknown signal id `{id}`"),
    })
}

/// Reads a scalar sampled signal from a `t,value` CSV.
pub fn read_sampled(path: &Path) -> Result<SampledSignal> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
        if row.len() != 2 {
            bail!("{}: row {} needs two columns", path.display(), i + 2);
        }
        times.push(number(&row[0], "sample time")?);
        values.push(number(&row[1], "sample value")?);
    }
    SampledSignal::scalar(times, values).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn parse_profile(id: &str, basis: &SpectralBasis) -> Result<Field> {
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    let err = |e| anyhow!("profile `{id}`: {e}");
    match (head, arg) {
        ("zero", None) => Ok(Field::zero(basis)),
        ("sin", None) => Field::sine_mode(basis, 1, 1.0).map_err(err),
        ("sin", Some(k)) => {
            let k = count(k, "sine mode")? as usize;
            Field::sine_mode(basis, k, 1.0).map_err(err)
        }
        ("modes", Some(list)) => {
            let amps = numbers(list, "mode amplitude")?;
            let mut x = Field::zero(basis);
            for (k, a) in amps.iter().enumerate() {
                let mode = Field::sine_mode(basis, k + 1, *a).map_err(err)?;
                x = x.combine(1.0, &mode, 1.0).map_err(err)?;
            }
            Ok(x)
        }
        ("const", Some(c)) => {
            let c = number(c, "constant")?;
            Field::from_coeffs(basis, basis.project_fn(|_| c)).map_err(err)
        }
        _ => bail!("unknown profile id `{id}`"),
    }
}

pub fn parse_ladder(id: &str) -> Result<Vec<f64>> {
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    let ladder = match (head, arg) {
        ("pow3", None) => pow3_ladder(1, 5),
        ("pow3", Some(range)) => {
            let (a, b) = range
                .split_once('-')
                .ok_or_else(|| anyhow!("pow3 range must read `first-last`"))?;
            let (a, b) = (count(a, "pow3 range")?, count(b, "pow3 range")?);
            if a > b {
                bail!("pow3 range `{range}` is empty");
            }
            pow3_ladder(a, b)
        }
        ("sqrt2", None) => sqrt2_ladder(5),
        ("sqrt2", Some(n)) => sqrt2_ladder(count(n, "ladder length")? as usize),
        ("int", None) => (1..=5).map(f64::from).collect(),
        ("int", Some(n)) => (1..=count(n, "ladder length")?).map(f64::from).collect(),
        ("list", Some(list)) => numbers(list, "ladder shift")?,
        _ => bail!("unknown ladder id `{id}`"),
    };
    if ladder.len() < 3 {
        bail!("ladder `{id}` has fewer than three shifts");
    }
    Ok(ladder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use aalab_core::aa_signals::SignalExt;
    use aalab_core::spectral_heat::assemble_basis;

    #[test]
    fn signal_ids() {
        let spec = UnboundedAASpec::default();
        assert_eq!(parse_signal("a", spec).unwrap().value(27.0).unwrap(), 3.0);
        assert_eq!(
            parse_signal("beta:2", spec).unwrap().value(9.0).unwrap(),
            1.0
        );
        assert_eq!(
            parse_signal("const:2", spec).unwrap().value(-4.0).unwrap(),
            2.0
        );
        assert_eq!(
            parse_signal("b", spec).unwrap().value(0.0).unwrap(),
            0.25f64.sin()
        );
        assert!((parse_signal("sin", spec).unwrap().value(0.25).unwrap() - 1.0).abs() < 1e-15);
        for bad in [
            "beta:0",
            "const",
            "sin:x",
            "nope",
            "a:1",
            "sampled:/no/such/file.csv",
        ] {
            assert!(parse_signal(bad, spec).is_err(), "{bad}");
        }
    }

    #[test]
    fn sampled_signal_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "t,value\n0,0\n1,2\n").unwrap();
        let s = parse_signal(
            &format!("sampled:{}", path.display()),
            UnboundedAASpec::default(),
        )
        .unwrap();
        assert_eq!(s.value(0.5).unwrap(), 1.0);
        assert!(s.value(2.0).is_err());
    }

    #[test]
    fn profile_ids() {
        let b = assemble_basis(1.0, 8, 32).unwrap();
        let two = parse_profile("modes:-0.3,0.1", &b).unwrap();
        let want = Field::from_fn(&b, |x| {
            -0.3 * (std::f64::consts::PI * x).sin() + 0.1 * (2.0 * std::f64::consts::PI * x).sin()
        })
        .unwrap();
        for (a, c) in two.coeffs().iter().zip(want.coeffs()) {
            assert!((a - c).abs() < 1e-14);
        }
        assert_eq!(
            parse_profile("sin", &b).unwrap(),
            parse_profile("sin:1", &b).unwrap()
        );
        assert!(parse_profile("const:1", &b).unwrap().coeffs()[0] > 0.0);
        assert!(parse_profile("sin:9", &b).is_err());
        assert!(parse_profile("bubble", &b).is_err());
    }

    #[test]
    fn ladder_ids() {
        assert_eq!(
            parse_ladder("pow3").unwrap(),
            [6.0, 18.0, 54.0, 162.0, 486.0]
        );
        assert_eq!(parse_ladder("pow3:2-4").unwrap(), [18.0, 54.0, 162.0]);
        assert_eq!(parse_ladder("int:3").unwrap(), [1.0, 2.0, 3.0]);
        assert_eq!(parse_ladder("list:1,2.5,4").unwrap(), [1.0, 2.5, 4.0]);
        assert!(parse_ladder("int:2").is_err());
        assert!(parse_ladder("pow3:4-2").is_err());
    }
}
