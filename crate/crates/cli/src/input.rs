use std::path::Path;

use hermlocal::padic::{HermJson, HermMatrix, PrimeContext};
use hermlocal::{Error, Result};

/// One diagonal token: an integer, `p`, `p^k`, or `c*p^k`.
fn parse_token(tok: &str, p: u64) -> Result<i128> {
    let tok = tok.trim();
    let bad = || Error::Parse(format!("cannot read diagonal entry '{tok}'"));
    let (coef, rest) = match tok.split_once('*') {
        Some((c, r)) => (c.trim().parse::<i128>().map_err(|_| bad())?, r.trim()),
        None => (1, tok),
    };
    let value = if let Some(e) = rest.strip_prefix("p^") {
        let e: u32 = e.parse().map_err(|_| bad())?;
        (p as i128).checked_pow(e).ok_or_else(bad)?
    } else if rest == "p" {
        p as i128
    } else {
        rest.parse::<i128>().map_err(|_| bad())?
    };
    coef.checked_mul(value).ok_or_else(bad)
}

/// Diagonal shorthand `1,p,p^3`.
pub fn parse_diagonal(spec: &str, ctx: PrimeContext) -> Result<HermMatrix> {
    let entries = spec
        .split(',')
        .map(|t| parse_token(t, ctx.p()))
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(Error::Parse("empty diagonal".into()));
    }
    Ok(HermMatrix::diagonal(ctx, &entries))
}

/// A `.json` path holding a hermitian matrix, or diagonal shorthand.
pub fn parse_matrix(spec: &str, ctx: PrimeContext) -> Result<HermMatrix> {
    if spec.ends_with(".json") {
        let text = std::fs::read_to_string(Path::new(spec))
            .map_err(|e| Error::Parse(format!("cannot read {spec}: {e}")))?;
        let j: HermJson =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        if j.p != ctx.p() {
            return Err(Error::InvalidArgument(format!(
                "{spec} is for p = {}, run uses p = {}",
                j.p,
                ctx.p()
            )));
        }
        HermMatrix::from_json_in(ctx, &j)
    } else {
        parse_diagonal(spec, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand() {
        let c = PrimeContext::new(3, 6).unwrap();
        let m = parse_diagonal("1,p,p^3,2*p^2", c).unwrap();
        assert_eq!(m.diagonal_entries().unwrap(), vec![1, 3, 27, 18]);
        assert!(parse_diagonal("1,q", c).is_err());
    }
}
