//! `start:stop:step` grids and small argument parsers.

use std::f64::consts::PI;

/// Inclusive grid; the last point may overshoot `stop` by less than half a
/// step, which absorbs rounding in `(stop - start) / step`. A bare number is
/// a one-point grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{s}` is not a finite number"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(format!("step must be positive, got {step}"));
            }
            if stop < start {
                return Err(format!("stop {stop} is below start {start}"));
            }
            let count = ((stop - start) / step + 0.5).ceil() as usize;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(format!(
            "expected START:STOP:STEP or a single value, got `{text}`"
        )),
    }
}

/// `NxM` with both counts at least one.
pub fn parse_grid_size(text: &str) -> Result<(usize, usize), String> {
    let (n, m) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{text}`"))?;
    let count = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| format!("`{s}` is not a positive count"))
    };
    Ok((count(n)?, count(m)?))
}

/// `a:b` frequency split; each side may be a fraction such as `1/3`.
/// Returns the share of the first photon, `a / (a + b)`.
pub fn parse_split(text: &str) -> Result<f64, String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got `{text}`"))?;
    let (a, b) = (fraction(a)?, fraction(b)?);
    if !(a > 0.0 && b > 0.0) {
        return Err(format!("both shares must be positive in `{text}`"));
    }
    // a + b == 1 keeps 0.5:0.5 and 1/3:2/3 exact
    let total = a + b;
    Ok(if total == 1.0 { a } else { a / total })
}

fn fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{s}` is not a number or fraction"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(parse(n)? / d)
        }
        None => parse(s),
    }
}

/// `count` evenly spaced values from 0 to `max_deg`, endpoints included.
pub fn linspace_deg(count: usize, max_deg: f64) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|i| max_deg * i as f64 / (count - 1) as f64)
        .collect()
}

/// Degrees to radians with 90, 180 and 360 landing exactly on pi/2, pi, 2 pi.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg / 180.0 * PI
}
