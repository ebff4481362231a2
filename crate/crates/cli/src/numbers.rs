//! Integer flags that accept scientific notation, parsed without going
//! through floating point.

/// `1000`, `1_000`, `1e10`, `2.5e3`; anything that is not an exact
/// non-negative integer is rejected.
pub fn parse_u64(s: &str) -> Result<u64, String> {
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..]
                .trim_start_matches('+')
                .parse()
                .map_err(|_| format!("bad exponent in `{s}`"))?;
            (&t[..i], e)
        }
        None => (t.as_str(), 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    let mut digits = format!("{int_part}{frac_part}");
    let mut exp = exp - frac_part.len() as i64;
    while exp < 0 {
        match digits.strip_suffix('0') {
            Some(rest) => {
                digits = rest.to_string();
                exp += 1;
            }
            None => return Err(format!("`{s}` is not an integer")),
        }
    }
    let overflow = || format!("`{s}` does not fit in 64 bits");
    let mut value: u64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| overflow())? };
    for _ in 0..exp {
        if value == 0 {
            break;
        }
        value = value.checked_mul(10).ok_or_else(overflow)?;
    }
    Ok(value)
}

pub fn parse_i64(s: &str) -> Result<i64, String> {
    match s.trim().strip_prefix('-') {
        Some(rest) => {
            let v = parse_u64(rest)?;
            if v > i64::MAX as u64 + 1 {
                return Err(format!("`{s}` does not fit in 64 bits"));
            }
            Ok((v as i128).wrapping_neg() as i64)
        }
        None => i64::try_from(parse_u64(s)?).map_err(|_| format!("`{s}` does not fit in 64 bits")),
    }
}

pub fn parse_u32(s: &str) -> Result<u32, String> {
    u32::try_from(parse_u64(s)?).map_err(|_| format!("`{s}` does not fit in 32 bits"))
}

/// Comma-separated list of [`parse_u64`] values.
pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_u64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct U64List(pub Vec<u64>);

pub fn parse_u64_list(s: &str) -> Result<U64List, String> {
    let v = parse_list(s)?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(U64List(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_integers() {
        assert_eq!(parse_u64("1e10"), Ok(10_000_000_000));
        assert_eq!(parse_u64("2.5e3"), Ok(2500));
        assert_eq!(parse_u64("1_000"), Ok(1000));
        assert_eq!(parse_u64("1E18"), Ok(1_000_000_000_000_000_000));
        assert_eq!(parse_u64("120e-1"), Ok(12));
        assert_eq!(parse_u64("0e5"), Ok(0));
        assert!(parse_u64("1.5").is_err());
        assert!(parse_u64("1e20").is_err());
        assert!(parse_u64("-3").is_err());
        assert!(parse_u64("abc").is_err());
        assert_eq!(parse_i64("-7"), Ok(-7));
        assert_eq!(parse_list("1e6,1e8, 1e10"), Ok(vec![1_000_000, 100_000_000, 10_000_000_000]));
    }
}
