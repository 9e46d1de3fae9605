//! Quantities written as `"<number> <unit>"`, e.g. `"25.3 GHz"`, `"1e4 ps^2"`,
//! `"0.3 ns^-2"`, `"3e-9 rad^2/ns^3"`.
//!
//! Only time carries a dimension; `rad` is dimensionless. Hertz units count
//! cycles, so they convert to angular frequency with a factor 2π.

use crate::units::TWO_PI;

/// A parsed quantity in internal units (ns, rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    /// Power of time: 1 for ns, -1 for rad/ns, 2 for ps².
    pub time_dim: i32,
    /// A hertz unit took part in the conversion.
    pub uses_hertz: bool,
    pub has_unit: bool,
}

struct Unit {
    factor: f64,
    time_dim: i32,
    hertz: bool,
}

fn lookup(name: &str) -> Option<Unit> {
    let time = |factor| Unit { factor, time_dim: 1, hertz: false };
    let hz = |scale: f64| Unit {
        factor: TWO_PI * scale,
        time_dim: -1,
        hertz: true,
    };
    Some(match name {
        "rad" => Unit { factor: 1.0, time_dim: 0, hertz: false },
        "ps" => time(1e-3),
        "ns" => time(1.0),
        "us" | "µs" => time(1e3),
        "ms" => time(1e6),
        "s" => time(1e9),
        "Hz" => hz(1e-9),
        "kHz" => hz(1e-6),
        "MHz" => hz(1e-3),
        "GHz" => hz(1.0),
        "THz" => hz(1e3),
        _ => return None,
    })
}

fn parse_term(term: &str) -> Result<(Unit, i32), String> {
    let (name, exp) = match term.split_once('^') {
        Some((n, e)) => (
            n,
            e.parse::<i32>()
                .map_err(|_| format!("bad exponent `{e}` in `{term}`"))?,
        ),
        None => (term, 1),
    };
    let unit = lookup(name).ok_or_else(|| format!("unknown unit `{name}`"))?;
    Ok((unit, exp))
}

/// Parses a unit expression such as `rad^2/ns^3` or `1/ms` into
/// (factor, time dimension, uses hertz).
pub fn parse_unit(expr: &str) -> Result<(f64, i32, bool), String> {
    let expr = expr.trim();
    let (num, den) = match expr.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (expr, None),
    };
    let mut factor = 1.0;
    let mut dim = 0;
    let mut hertz = false;
    let mut apply = |part: &str, sign: i32| -> Result<(), String> {
        for term in part.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            if term == "1" {
                continue;
            }
            let (u, e) = parse_term(term)?;
            factor *= u.factor.powi(sign * e);
            dim += sign * e * u.time_dim;
            hertz |= u.hertz;
        }
        Ok(())
    };
    apply(num, 1)?;
    if let Some(d) = den {
        if d.is_empty() || d.contains('/') {
            return Err(format!("malformed unit `{expr}`"));
        }
        apply(d, -1)?;
    }
    Ok((factor, dim, hertz))
}

/// Parses `"<number> <unit>"`; a lone number is dimensionless.
pub fn parse_quantity(text: &str) -> Result<Quantity, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_whitespace() || c == '/')
        .unwrap_or(text.len());
    let (number, unit) = text.split_at(split);
    let value: f64 = number
        .parse()
        .map_err(|_| format!("expected `<number> <unit>`, got `{text}`"))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(Quantity {
            value,
            time_dim: 0,
            uses_hertz: false,
            has_unit: false,
        });
    }
    let unit = unit.strip_prefix('*').map(str::trim).unwrap_or(unit);
    let (factor, time_dim, uses_hertz) = if let Some(rest) = unit.strip_prefix('/') {
        parse_unit(&format!("1/{rest}"))?
    } else {
        parse_unit(unit)?
    };
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(Quantity {
        value: value * factor,
        time_dim,
        uses_hertz,
        has_unit: true,
    })
}
