use std::path::Path;

use thiserror::Error;

use super::TspInstance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsplibError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unsupported EDGE_WEIGHT_TYPE `{0}` (only EUC_2D)")]
    UnsupportedEdgeWeightType(String),
    #[error("{0}")]
    Io(String),
}

fn format_err(line: usize, message: impl Into<String>) -> TsplibError {
    TsplibError::Format {
        line,
        message: message.into(),
    }
}

/// TSPLIB rounding: nearest integer, halves up.
pub fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

pub fn load_tsplib(path: &Path) -> Result<TspInstance, TsplibError> {
    let text = std::fs::read_to_string(path).map_err(|e| TsplibError::Io(format!("{}: {e}", path.display())))?;
    parse_tsplib(&text)
}

pub fn parse_tsplib(text: &str) -> Result<TspInstance, TsplibError> {
    let mut name = None;
    let mut dimension = None;
    let mut in_coords = false;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(format_err(line_no, "expected `index x y`"));
            }
            let id: usize = fields[0].parse().map_err(|_| format_err(line_no, "bad node index"))?;
            let x: f64 = fields[1].parse().map_err(|_| format_err(line_no, "bad x coordinate"))?;
            let y: f64 = fields[2].parse().map_err(|_| format_err(line_no, "bad y coordinate"))?;
            if id == 0 || id > coords.len() {
                return Err(format_err(line_no, format!("node index {id} out of range")));
            }
            if coords[id - 1].replace((x, y)).is_some() {
                return Err(format_err(line_no, format!("node {id} listed twice")));
            }
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            let n = dimension.ok_or_else(|| format_err(line_no, "NODE_COORD_SECTION before DIMENSION"))?;
            coords = vec![None; n];
            in_coords = true;
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| format_err(line_no, "expected `KEY : VALUE`"))?;
        let value = value.trim();
        match key.trim() {
            "NAME" => name = Some(value.to_string()),
            "TYPE" if value != "TSP" => return Err(format_err(line_no, format!("unsupported TYPE `{value}`"))),
            "DIMENSION" => {
                dimension = Some(value.parse().map_err(|_| format_err(line_no, "bad DIMENSION"))?);
            }
            "EDGE_WEIGHT_TYPE" if value != "EUC_2D" => {
                return Err(TsplibError::UnsupportedEdgeWeightType(value.to_string()))
            }
            _ => {}
        }
    }
    if !in_coords {
        return Err(format_err(text.lines().count(), "missing NODE_COORD_SECTION"));
    }
    let coords = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| format_err(text.lines().count(), format!("node {} has no coordinates", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() < 3 {
        return Err(format_err(1, "need at least 3 nodes"));
    }
    Ok(TspInstance::from_coords(
        name.unwrap_or_else(|| "unnamed".into()),
        coords,
        |a, b| nint(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> String {
        format!("NAME: t\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n{body}EOF\n")
    }

    #[test]
    fn rounding_convention() {
        let inst = parse_tsplib(&doc("1 0 0\n2 0 3\n3 1 1\n")).unwrap();
        assert_eq!(inst.distance().get(0, 1), 3.0);
        assert_eq!(inst.distance().get(0, 2), 1.0);
        assert_eq!(nint(2.5), 3.0);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_tsplib(&doc("1 0 0\n2 0 x\n3 1 1\n")).unwrap_err();
        assert_eq!(err, format_err(7, "bad y coordinate"));
        let geo = "NAME: g\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: GEO\n";
        assert_eq!(
            parse_tsplib(geo).unwrap_err(),
            TsplibError::UnsupportedEdgeWeightType("GEO".into())
        );
    }
}
