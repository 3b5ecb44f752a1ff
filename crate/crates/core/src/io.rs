//! File formats shared with the command-line tool.
//!
//! * Point clouds: CSV with header `x1,...,xN[,mark]`, one point per row.
//! * Diagrams: CSV with header `q,birth,death`, `inf` for an infinite death,
//!   rows sorted by `(q, birth, death)`.
//! * Binned measures: CSV `birth_bin,death_bin,mass` (`death_bin = inf` for the
//!   infinity row) plus a JSON sidecar carrying the grid metadata.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::diagram::BinnedMeasure;
use crate::error::{Error, Result};
use crate::geometry::{MarkedPoint, MarkedPointCloud};
use crate::homology::{DiagramPoint, VerboseDiagram};

/// `inf` for ∞, otherwise the shortest round-trip decimal form.
pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "Inf" | "infinity" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

/// Serde adapter for `f64` fields that may be ∞, written as the string `"inf"`.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => super::parse_float(&s).ok_or_else(|| serde::de::Error::custom(format!("not a number: {s}"))),
        }
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        msg: e.to_string(),
    }
}

/// Reads a point cloud; `R0` is the largest mark.
pub fn read_cloud<R: Read>(reader: R) -> Result<MarkedPointCloud> {
    let mut rdr = csv_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(Error::Parse {
                row: 1,
                msg: "empty file, expected header x1..xN[,mark]".into(),
            })
        }
        Some(r) => r.map_err(csv_err)?,
    };
    let names: Vec<&str> = header.iter().collect();
    let marked = names.last() == Some(&"mark");
    let dim = names.len() - usize::from(marked);
    let expected: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    if dim == 0 || names[..dim] != expected.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        return Err(Error::Parse {
            row: 1,
            msg: format!("bad header `{}`, expected x1..xN[,mark]", names.join(",")),
        });
    }
    let mut points = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != names.len() {
            return Err(Error::Parse {
                row,
                msg: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let values: Vec<f64> = record
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse {
                row,
                msg: "non-numeric or non-finite field".into(),
            })?;
        let mark = if marked { values[dim] } else { 0.0 };
        if mark < 0.0 {
            return Err(Error::Parse {
                row,
                msg: format!("negative mark {mark}"),
            });
        }
        points.push(MarkedPoint::new(values[..dim].to_vec(), mark));
    }
    let r0 = points.iter().map(|p| p.mark).fold(0.0, f64::max);
    MarkedPointCloud::new(points, dim, r0)
}

pub fn write_cloud<W: Write>(mut w: W, cloud: &MarkedPointCloud) -> Result<()> {
    let marked = cloud.points().iter().any(|p| p.mark != 0.0);
    let mut header: Vec<String> = (1..=cloud.dim()).map(|i| format!("x{i}")).collect();
    if marked {
        header.push("mark".into());
    }
    writeln!(w, "{}", header.join(","))?;
    for p in cloud.points() {
        let mut fields: Vec<String> = p.coords.iter().map(|&c| format_float(c)).collect();
        if marked {
            fields.push(format_float(p.mark));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Writes the diagrams as one `q,birth,death` table sorted by `(q, birth, death)`.
pub fn write_diagrams<W: Write>(mut w: W, diagrams: &[VerboseDiagram]) -> Result<()> {
    writeln!(w, "q,birth,death")?;
    let mut sorted: Vec<&VerboseDiagram> = diagrams.iter().collect();
    sorted.sort_by_key(|d| d.q());
    for d in sorted {
        // points are kept in (birth, death) order
        for p in d.points() {
            writeln!(w, "{},{},{}", d.q(), format_float(p.birth), format_float(p.death))?;
        }
    }
    Ok(())
}

/// Parses a diagram table into one diagram per degree present. The truncation
/// threshold is not part of the format and is set to ∞.
pub fn read_diagrams<R: Read>(reader: R) -> Result<BTreeMap<usize, VerboseDiagram>> {
    let mut rdr = csv_reader(reader);
    let mut records = rdr.records();
    match records.next() {
        None => {
            return Err(Error::Parse {
                row: 1,
                msg: "empty file, expected header q,birth,death".into(),
            })
        }
        Some(r) => {
            let h = r.map_err(csv_err)?;
            if h.iter().collect::<Vec<_>>() != ["q", "birth", "death"] {
                return Err(Error::Parse {
                    row: 1,
                    msg: "expected header q,birth,death".into(),
                });
            }
        }
    }
    let mut by_degree: BTreeMap<usize, Vec<DiagramPoint>> = BTreeMap::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let bad = |msg: &str| Error::Parse {
            row,
            msg: msg.to_string(),
        };
        if record.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let q: usize = record[0]
            .parse()
            .map_err(|_| bad("degree is not a nonnegative integer"))?;
        let birth = parse_float(&record[1]).ok_or_else(|| bad("bad birth value"))?;
        let death = parse_float(&record[2]).ok_or_else(|| bad("bad death value"))?;
        let p = DiagramPoint::new(birth, death);
        // validate per row so the error names the row
        VerboseDiagram::new(q, f64::INFINITY, vec![p]).map_err(|e| bad(&e.to_string()))?;
        by_degree.entry(q).or_default().push(p);
    }
    by_degree
        .into_iter()
        .map(|(q, pts)| Ok((q, VerboseDiagram::new(q, f64::INFINITY, pts)?)))
        .collect()
}

/// Grid metadata written next to a measure table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureMeta {
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
    pub normalizer: f64,
    #[serde(with = "float_or_inf")]
    pub t_max: f64,
    pub overflow_mass: f64,
}

pub fn measure_meta(m: &BinnedMeasure) -> MeasureMeta {
    MeasureMeta {
        l: m.l(),
        h: m.h(),
        normalizer: m.normalizer(),
        t_max: m.t_max(),
        overflow_mass: m.overflow_mass(),
    }
}

/// Every bin on or above the diagonal, then the infinity row.
pub fn write_measure<W: Write>(mut w: W, m: &BinnedMeasure) -> Result<()> {
    writeln!(w, "birth_bin,death_bin,mass")?;
    for i in 0..m.bins() {
        for j in i..m.bins() {
            writeln!(w, "{i},{j},{}", format_float(m.mass(i, j)))?;
        }
    }
    for i in 0..m.bins() {
        writeln!(w, "{i},inf,{}", format_float(m.inf_mass(i)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cloud_round_trip() {
        let text = "x1,x2,mark\n0,0,0.5\n1.5,-2,0\n";
        let c = read_cloud(text.as_bytes()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.mark(0), 0.5);
        assert_eq!(c.r0(), 0.5);
        let mut out = Vec::new();
        write_cloud(&mut out, &c).unwrap();
        assert_eq!(read_cloud(out.as_slice()).unwrap(), c);
    }

    #[test]
    fn cloud_errors_name_rows() {
        assert!(matches!(read_cloud("".as_bytes()), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(
            read_cloud("a,b\n1,2\n".as_bytes()),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(matches!(
            read_cloud("x1,x2\n1,2\n3,oops\n".as_bytes()),
            Err(Error::Parse { row: 3, .. })
        ));
        assert!(matches!(
            read_cloud("x1,x2\n1,2\n3\n".as_bytes()),
            Err(Error::Parse { row: 3, .. })
        ));
        assert!(matches!(
            read_cloud("x1,mark\n1,-1\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(read_cloud("x1\n1\n1\n".as_bytes()), Err(Error::Domain(_))));
    }

    #[test]
    fn header_only_cloud_is_empty() {
        let c = read_cloud("x1,x2,x3\n".as_bytes()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn diagram_rows_sorted_and_inf() {
        let d1 = VerboseDiagram::new(1, f64::INFINITY, vec![DiagramPoint::new(1.0, 1.0)]).unwrap();
        let d0 = VerboseDiagram::new(
            0,
            f64::INFINITY,
            vec![DiagramPoint::new(0.0, f64::INFINITY), DiagramPoint::new(0.0, 0.5)],
        )
        .unwrap();
        let mut out = Vec::new();
        write_diagrams(&mut out, &[d1, d0]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "q,birth,death\n0,0,0.5\n0,0,inf\n1,1,1\n"
        );
    }

    #[test]
    fn diagram_parse_errors() {
        assert!(matches!(read_diagrams("".as_bytes()), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(
            read_diagrams("q,birth,death\n0,2,1\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read_diagrams("q,birth,death\n0,0,1\nx,0,1\n".as_bytes()),
            Err(Error::Parse { row: 3, .. })
        ));
    }

    #[test]
    fn measure_table_layout() {
        let vd = VerboseDiagram::new(0, 1.0, vec![DiagramPoint::new(0.0, f64::INFINITY)]).unwrap();
        let m = crate::diagram::bin_measure(&vd, 1.0, 0.5, 2.0).unwrap();
        let mut out = Vec::new();
        write_measure(&mut out, &m).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "birth_bin,death_bin,mass\n0,0,0\n0,1,0\n1,1,0\n0,inf,0.5\n1,inf,0\n"
        );
        let meta = serde_json::to_string(&measure_meta(&m)).unwrap();
        assert_eq!(
            meta,
            r#"{"L":1.0,"h":0.5,"normalizer":2.0,"t_max":1.0,"overflow_mass":0.0}"#
        );
    }

    proptest! {
        #[test]
        fn diagram_csv_round_trip(raw in proptest::collection::vec((0usize..3, 0.0f64..10.0, 0.0f64..5.0, any::<bool>()), 0..20)) {
            let mut per_q: BTreeMap<usize, Vec<DiagramPoint>> = BTreeMap::new();
            for (q, b, l, inf) in raw {
                per_q.entry(q).or_default().push(DiagramPoint::new(b, if inf { f64::INFINITY } else { b + l }));
            }
            let diagrams: Vec<VerboseDiagram> = per_q
                .into_iter()
                .map(|(q, p)| VerboseDiagram::new(q, f64::INFINITY, p).unwrap())
                .collect();
            let mut out = Vec::new();
            write_diagrams(&mut out, &diagrams).unwrap();
            let back = read_diagrams(out.as_slice()).unwrap();
            prop_assert_eq!(back.into_values().collect::<Vec<_>>(), diagrams);
        }
    }
}
