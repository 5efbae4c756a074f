//! Cloud files: a `#`-prefixed header (`k`, `N`, `seed`, `provenance`,
//! `params`) followed by one row `re1,im1[,re2,im2],weight` per point.
//! Numbers are written with 17 significant digits, which round-trips `f64`.

use super::{Provenance, WeightedCloud};
use crate::error::{Error, Result};
use crate::point::{Point, C64};
use crate::rng::Seed;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

const MAGIC: &str = "# polylike cloud v1";

pub fn write_cloud<W: Write>(cloud: &WeightedCloud, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "# k={}", cloud.k)?;
    writeln!(out, "# N={}", cloud.len())?;
    match cloud.seed {
        Some(s) => writeln!(out, "# seed={}", s.0)?,
        None => writeln!(out, "# seed=none")?,
    }
    writeln!(out, "# provenance={}", cloud.provenance.as_str())?;
    writeln!(
        out,
        "# params={}",
        serde_json::to_string(&cloud.params).expect("string map serialises")
    )?;
    let cols: Vec<String> = (1..=cloud.k)
        .flat_map(|j| [format!("re{j}"), format!("im{j}")])
        .collect();
    writeln!(out, "{},weight", cols.join(","))?;
    for (p, w) in cloud.points.iter().zip(&cloud.weights) {
        for j in 0..cloud.k {
            write!(out, "{:.16e},{:.16e},", p[j].re, p[j].im)?;
        }
        writeln!(out, "{w:.16e}")?;
    }
    Ok(())
}

fn header<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix("# ")
        .and_then(|l| l.strip_prefix(key))
        .and_then(|l| l.strip_prefix('='))
        .ok_or_else(|| Error::Format(format!("expected header `# {key}=...`, found `{line}`")))
}

fn num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("bad number `{s}`")))
}

pub fn read_cloud<R: BufRead>(input: R) -> Result<WeightedCloud> {
    let mut lines = input.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format("truncated cloud file".into()))?
            .map_err(Error::from)
    };
    if next()? != MAGIC {
        return Err(Error::Format("missing cloud file magic line".into()));
    }
    let k: usize = header(&next()?, "k")?
        .parse()
        .map_err(|_| Error::Format("bad k".into()))?;
    if !(1..=2).contains(&k) {
        return Err(Error::Format(format!("unsupported dimension {k}")));
    }
    let n: usize = header(&next()?, "N")?
        .parse()
        .map_err(|_| Error::Format("bad N".into()))?;
    let seed_line = next()?;
    let seed = match header(&seed_line, "seed")? {
        "none" => None,
        s => Some(Seed(
            s.parse().map_err(|_| Error::Format("bad seed".into()))?,
        )),
    };
    let provenance = Provenance::parse(header(&next()?, "provenance")?)?;
    let params: BTreeMap<String, String> = serde_json::from_str(header(&next()?, "params")?)
        .map_err(|e| Error::Format(format!("bad params: {e}")))?;
    next()?;
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        let row = next()?;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 * k + 1 {
            return Err(Error::Format(format!(
                "row `{row}` has {} fields, expected {}",
                fields.len(),
                2 * k + 1
            )));
        }
        let mut p = Point::default();
        for j in 0..k {
            p[j] = C64::new(num(fields[2 * j])?, num(fields[2 * j + 1])?);
        }
        points.push(p);
        weights.push(num(fields[2 * k])?);
    }
    Ok(WeightedCloud {
        k,
        points,
        weights,
        provenance,
        seed,
        params,
    })
}
