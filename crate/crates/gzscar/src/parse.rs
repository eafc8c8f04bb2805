//! Command-line value parsers: angles as multiples of pi, spins as
//! fractions, and integer or real ranges.

use std::f64::consts::PI;

fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (number(a)?, number(b)?);
        if b == 0.0 {
            return Err(format!("division by zero in '{s}'"));
        }
        return Ok(a / b);
    }
    s.parse::<f64>().map_err(|_| format!("not a number: '{s}'"))
}

/// Parses `0.75`, `pi`, `-pi/4`, `2pi/3`, `2*pi/3`, `0.5pi`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let Some((pre, post)) = t.split_once("pi") else {
        return number(&t).and_then(finite);
    };
    let pre = pre.trim().trim_end_matches('*').trim();
    let coef = match pre {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => number(p)?,
    };
    let post = post.trim();
    let div = match post {
        "" => 1.0,
        p => match p.strip_prefix('/') {
            Some(d) => number(d)?,
            None => return Err(format!("cannot parse angle '{s}'")),
        },
    };
    if div == 0.0 {
        return Err(format!("division by zero in '{s}'"));
    }
    finite(coef * PI / div)
}

fn finite(x: f64) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err("value must be finite".into())
    }
}

/// A real value, also accepting `a/b`.
pub fn real(s: &str) -> Result<f64, String> {
    number(s).and_then(finite)
}

/// Spin `S` given as `1/2`, `1`, `1.5`; returns `2S`.
pub fn two_s(s: &str) -> Result<u32, String> {
    let v = number(s)?;
    let t = 2.0 * v;
    if !(t >= 1.0) || (t - t.round()).abs() > 1e-12 || t > 1e6 {
        return Err(format!("spin must be a positive multiple of 1/2, got '{s}'"));
    }
    Ok(t.round() as u32)
}

/// Positive real spin for semiclassical commands.
pub fn spin(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("spin must be positive, got '{s}'"));
    }
    Ok(v)
}

/// `a:b` (inclusive) or a single integer.
pub fn int_range(s: &str) -> Result<(usize, usize), String> {
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("not an integer: '{x}'"));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (p(a)?, p(b)?),
        None => {
            let a = p(s)?;
            (a, a)
        }
    };
    if a > b {
        return Err(format!("empty range '{s}'"));
    }
    Ok((a, b))
}

/// `lo:hi:n` (n evenly spaced points, endpoints included), a comma list,
/// or a single value.
pub fn real_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let (lo, hi) = (real(lo)?, real(hi)?);
            let n: usize = n.trim().parse().map_err(|_| format!("not a count: '{n}'"))?;
            match n {
                0 => Err("grid needs at least one point".into()),
                1 => Ok(vec![lo]),
                _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [one] => one.split(',').map(real).collect(),
        _ => Err(format!("expected lo:hi:n or a comma list, got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(angle("pi").unwrap(), PI);
        assert_eq!(angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(angle(" 0.5 PI ").unwrap(), 0.5 * PI);
        assert_eq!(angle("0.25").unwrap(), 0.25);
        for bad in ["pi3", "x", "pi/0", "", "pi/", "inf"] {
            assert!(angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn spins() {
        assert_eq!(two_s("1/2").unwrap(), 1);
        assert_eq!(two_s("1").unwrap(), 2);
        assert_eq!(two_s("2.5").unwrap(), 5);
        assert!(two_s("0").is_err());
        assert!(two_s("0.3").is_err());
        assert_eq!(spin("3/2").unwrap(), 1.5);
    }

    #[test]
    fn ranges() {
        assert_eq!(int_range("7:80").unwrap(), (7, 80));
        assert_eq!(int_range("9").unwrap(), (9, 9));
        assert!(int_range("8:7").is_err());
        assert_eq!(real_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(real_grid("0.2,0.8").unwrap(), vec![0.2, 0.8]);
        assert!(real_grid("0:1:0").is_err());
    }
}
