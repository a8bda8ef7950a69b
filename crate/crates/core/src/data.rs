use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, TreatmentPair};

/// One row `(c, a, z, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub c: f64,
    pub a: f64,
    pub z: f64,
    pub y: f64,
}

impl Observation {
    pub fn new(c: f64, a: f64, z: f64, y: f64) -> Self {
        Self { c, a, z, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Observation>,
    pair: TreatmentPair,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

impl Dataset {
    pub fn new(rows: Vec<Observation>, pair: TreatmentPair) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidData(format!("need at least 2 rows, got {}", rows.len())));
        }
        if let Some(i) = rows
            .iter()
            .position(|r| !(r.c.is_finite() && r.a.is_finite() && r.z.is_finite() && r.y.is_finite()))
        {
            return Err(Error::InvalidData(format!("row {i} has a non-finite value")));
        }
        for lvl in [pair.a_star, pair.a_ref] {
            if !rows.iter().any(|r| r.a == lvl) {
                return Err(Error::InvalidData(format!("treatment level {lvl} never observed")));
            }
        }
        Ok(Self { rows, pair })
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn pair(&self) -> TreatmentPair {
        self.pair
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn a_support(&self) -> Vec<f64> {
        sorted_unique(self.rows.iter().map(|r| r.a).collect())
    }

    pub fn c_support(&self) -> Vec<f64> {
        sorted_unique(self.rows.iter().map(|r| r.c).collect())
    }

    pub fn z_support(&self) -> Vec<f64> {
        sorted_unique(self.rows.iter().map(|r| r.z).collect())
    }

    /// Rows selected by index, keeping the treatment pair. Does not re-validate
    /// that both levels appear.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            rows: idx.iter().map(|&i| self.rows[i]).collect(),
            pair: self.pair,
        }
    }

    /// Parses the `c,a,z,y` text format.
    pub fn read_csv<R: Read>(reader: R, pair: TreatmentPair) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        let names: Vec<_> = headers.iter().collect();
        if names != ["c", "a", "z", "y"] {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header c,a,z,y, found {}", names.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let mut r = [0.0; 4];
            for (k, field) in rec.iter().enumerate() {
                r[k] = field.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("cannot parse `{field}` as a number"),
                })?;
            }
            rows.push(Observation::new(r[0], r[1], r[2], r[3]));
        }
        Self::new(rows, pair)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wtr.write_record(["c", "a", "z", "y"]).map_err(io)?;
        for r in &self.rows {
            wtr.write_record([r.c, r.a, r.z, r.y].map(|x| format!("{x:?}"))).map_err(io)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
