//! JSON form of a slit domain:
//! `{"outer": [[x,y],...], "slits": [[[x1,y1],[x2,y2]],...]}`.
//!
//! Coordinates are decimal (or `p/q`) strings so dyadic values stay exact.
//! Plain JSON numbers are accepted on input.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Point, SlitDomain};
use crate::error::{Error, Result};
use crate::scalar::{format_exact, parse_exact, Exact};

#[derive(Serialize, Deserialize)]
struct DomainFile {
    outer: Vec<[Value; 2]>,
    #[serde(default)]
    slits: Vec<[[Value; 2]; 2]>,
}

fn coord(v: &Value) -> Result<Exact> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::Parse(format!("coordinate {other} is not a number"))),
    };
    parse_exact(&s).ok_or_else(|| Error::Parse(format!("cannot read coordinate '{s}'")))
}

fn point(v: &[Value; 2]) -> Result<Point<Exact>> {
    Ok(Point::new(coord(&v[0])?, coord(&v[1])?))
}

fn value(x: &Exact) -> Value {
    Value::String(format_exact(x))
}

pub fn domain_from_json(text: &str) -> Result<SlitDomain<Exact>> {
    let file: DomainFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("domain file: {e}")))?;
    let outer = file.outer.iter().map(point).collect::<Result<Vec<_>>>()?;
    let slits = file
        .slits
        .iter()
        .map(|s| Ok((point(&s[0])?, point(&s[1])?)))
        .collect::<Result<Vec<_>>>()?;
    SlitDomain::new(outer, slits)
}

pub fn domain_to_json(dom: &SlitDomain<Exact>) -> String {
    let file = DomainFile {
        outer: dom
            .outer()
            .iter()
            .map(|p| [value(&p.x), value(&p.y)])
            .collect(),
        slits: dom
            .slits()
            .iter()
            .map(|s| {
                [
                    [value(&s.a.x), value(&s.a.y)],
                    [value(&s.b.x), value(&s.b.y)],
                ]
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("domain serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_geometry::build_slit_rectangle;

    #[test]
    fn round_trip() {
        let d =
            build_slit_rectangle(Exact::new(1, 1), Exact::new(1, 1), Exact::new(1, 2), 8).unwrap();
        let text = domain_to_json(&d);
        assert!(text.contains("\"0.125\""));
        let back = domain_from_json(&text).unwrap();
        assert_eq!(back.outer(), d.outer());
        assert_eq!(back.slits(), d.slits());
    }

    #[test]
    fn numbers_and_fractions() {
        let text = r#"{"outer": [[0,0],["1",0],["1","1/2^1"],[0,"0.5"]],
                       "slits": [[["1/4","0"],["1/4","1/4"]]]}"#;
        let d = domain_from_json(text).unwrap();
        assert_eq!(d.area(), Exact::new(1, 2));
        assert!(domain_from_json("{\"outer\": [[\"x\",0]]}").is_err());
    }
}
