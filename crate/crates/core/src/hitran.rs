//! HITRAN 2004 fixed-width line records (`.par`, 160 columns per record).
//!
//! Only the parameters that feed the line-shape model are retained. Quantum
//! labels, uncertainty codes, references and statistical weights are skipped.
//!
//! Numeric fields follow Fortran list conventions: blanks anywhere inside the
//! field are ignored and `D` is accepted as an exponent marker.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{domain, Result};

/// Width of one record, excluding the line terminator.
pub const RECORD_LEN: usize = 160;

/// Fixed column span of one record field (0-based, end exclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub name: &'static str,
    pub start: usize,
    pub end: usize,
}

impl Field {
    const fn new(name: &'static str, start: usize, end: usize) -> Self {
        Self { name, start, end }
    }

    pub fn width(&self) -> usize {
        self.end - self.start
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based inclusive, as in the format documentation
        write!(f, "{} (columns {}-{})", self.name, self.start + 1, self.end)
    }
}

pub const MOLECULE: Field = Field::new("molecule", 0, 2);
pub const ISOTOPOLOGUE: Field = Field::new("isotopologue", 2, 3);
pub const WAVENUMBER: Field = Field::new("wavenumber", 3, 15);
pub const INTENSITY: Field = Field::new("intensity", 15, 25);
pub const EINSTEIN_A: Field = Field::new("einstein_a", 25, 35);
pub const GAMMA_AIR: Field = Field::new("gamma_air", 35, 40);
pub const GAMMA_SELF: Field = Field::new("gamma_self", 40, 45);
pub const LOWER_ENERGY: Field = Field::new("e_lower", 45, 55);
pub const N_AIR: Field = Field::new("n_air", 55, 59);
pub const DELTA_AIR: Field = Field::new("delta_air", 59, 67);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("record must be {RECORD_LEN} bytes long, found {found}")]
    WrongLength { found: usize },

    #[error("record contains a non-ASCII byte at offset {offset}")]
    NonAscii { offset: usize },

    #[error("cannot parse {field} from {text:?}")]
    Field { field: Field, text: String },

    #[error("{field} holds a non-physical value {text:?}")]
    Invalid { field: Field, text: String },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ParseError>,
    },
}

/// One transition from the line list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub molecule_id: u8,
    pub isotopologue_id: u8,
    /// Line-centre wavenumber, cm⁻¹.
    pub nu0: f64,
    /// Intensity at 296 K, cm⁻¹/(molecule·cm⁻²).
    pub intensity: f64,
    /// Air-broadened half width at half maximum, cm⁻¹/atm.
    pub gamma_air: f64,
    /// Self-broadened half width at half maximum, cm⁻¹/atm.
    pub gamma_self: f64,
    /// Lower-state energy, cm⁻¹.
    pub e_lower: f64,
    /// Temperature exponent of the broadening coefficients.
    pub n_air: f64,
    /// Air pressure shift, cm⁻¹/atm.
    pub delta_air: f64,
}

/// Parses one 160-column record. A single trailing `\n` or `\r\n` is ignored.
pub fn parse_record(record: &str) -> std::result::Result<SpectralLine, ParseError> {
    let record = record.strip_suffix('\n').unwrap_or(record);
    let record = record.strip_suffix('\r').unwrap_or(record);
    parse_record_bytes(record.as_bytes())
}

/// Byte-level entry point; never panics on arbitrary input.
pub fn parse_record_bytes(record: &[u8]) -> std::result::Result<SpectralLine, ParseError> {
    if record.len() != RECORD_LEN {
        return Err(ParseError::WrongLength {
            found: record.len(),
        });
    }
    if let Some(offset) = record.iter().position(|b| !b.is_ascii()) {
        return Err(ParseError::NonAscii { offset });
    }

    let molecule_id = parse_molecule(record)?;
    let isotopologue_id = parse_isotopologue(record)?;
    let nu0 = parse_float(record, WAVENUMBER)?;
    let intensity = parse_float(record, INTENSITY)?;
    let gamma_air = parse_float(record, GAMMA_AIR)?;
    let gamma_self = parse_float(record, GAMMA_SELF)?;
    let e_lower = parse_float(record, LOWER_ENERGY)?;
    let n_air = parse_float(record, N_AIR)?;
    let delta_air = parse_float(record, DELTA_AIR)?;

    let invalid = |field: Field| ParseError::Invalid {
        field,
        text: field_text(record, field).to_string(),
    };
    if nu0 <= 0.0 {
        return Err(invalid(WAVENUMBER));
    }
    if intensity < 0.0 {
        return Err(invalid(INTENSITY));
    }
    if gamma_air <= 0.0 {
        return Err(invalid(GAMMA_AIR));
    }
    if gamma_self < 0.0 {
        return Err(invalid(GAMMA_SELF));
    }

    Ok(SpectralLine {
        molecule_id,
        isotopologue_id,
        nu0,
        intensity,
        gamma_air,
        gamma_self,
        e_lower,
        n_air,
        delta_air,
    })
}

fn field_text(record: &[u8], field: Field) -> &str {
    // the record is checked to be ASCII before any field is sliced
    std::str::from_utf8(&record[field.start..field.end]).unwrap_or("")
}

fn compact(text: &str) -> String {
    text.chars().filter(|c| *c != ' ').collect()
}

fn parse_float(record: &[u8], field: Field) -> std::result::Result<f64, ParseError> {
    let text = field_text(record, field);
    let cleaned = compact(text).replace(['D', 'd'], "E");
    let err = || ParseError::Field {
        field,
        text: text.to_string(),
    };
    // reject words such as "inf" or "nan" that f64::from_str accepts
    if cleaned.is_empty()
        || !cleaned
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | 'E' | 'e'))
    {
        return Err(err());
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err()),
    }
}

fn parse_molecule(record: &[u8]) -> std::result::Result<u8, ParseError> {
    let text = field_text(record, MOLECULE);
    match compact(text).parse::<u8>() {
        Ok(id) if id > 0 => Ok(id),
        _ => Err(ParseError::Field {
            field: MOLECULE,
            text: text.to_string(),
        }),
    }
}

/// Isotopologue codes: `1`–`9`, `0` for 10, then `A`, `B`, ... for 11 onwards.
fn parse_isotopologue(record: &[u8]) -> std::result::Result<u8, ParseError> {
    let c = record[ISOTOPOLOGUE.start];
    match c {
        b'1'..=b'9' => Ok(c - b'0'),
        b'0' => Ok(10),
        b'A'..=b'Z' => Ok(c - b'A' + 11),
        _ => Err(ParseError::Field {
            field: ISOTOPOLOGUE,
            text: (c as char).to_string(),
        }),
    }
}

fn isotopologue_code(id: u8) -> Option<char> {
    match id {
        1..=9 => Some((b'0' + id) as char),
        10 => Some('0'),
        11..=36 => Some((b'A' + id - 11) as char),
        _ => None,
    }
}

/// Fixed-point field, dropping a leading zero (`0.0771` → `.0771`) when the
/// width requires it, as Fortran `F` editing does.
fn fixed(value: f64, field: Field, decimals: usize) -> Result<String> {
    let mut text = format!("{value:.decimals$}");
    if text.len() > field.width() {
        if let Some(rest) = text.strip_prefix("0.") {
            text = format!(".{rest}");
        } else if let Some(rest) = text.strip_prefix("-0.") {
            text = format!("-.{rest}");
        }
    }
    pad(text, field)
}

/// Scientific field with a signed two-digit exponent, e.g. `1.189E-20`.
fn scientific(value: f64, field: Field, decimals: usize) -> Result<String> {
    let text = format!("{value:.decimals$E}");
    let (mantissa, exponent) = text.split_once('E').unwrap_or((&text, "0"));
    let exponent: i32 = exponent.parse().unwrap_or(0);
    let sign = if exponent < 0 { '-' } else { '+' };
    pad(
        format!("{mantissa}E{sign}{:02}", exponent.unsigned_abs()),
        field,
    )
}

fn pad(text: String, field: Field) -> Result<String> {
    if text.len() > field.width() {
        return domain(format!("value {text} does not fit {field}"));
    }
    Ok(format!("{text:>width$}", width = field.width()))
}

impl SpectralLine {
    /// Writes the record back in the 160-column layout. Columns that are not
    /// retained are left blank.
    pub fn to_record(&self) -> Result<String> {
        if self.molecule_id == 0 || self.molecule_id > 99 {
            return domain(format!(
                "molecule id {} does not fit {MOLECULE}",
                self.molecule_id
            ));
        }
        let iso = isotopologue_code(self.isotopologue_id).ok_or_else(|| {
            crate::Error::Domain(format!(
                "isotopologue id {} has no single-character code",
                self.isotopologue_id
            ))
        })?;
        let mut out = String::with_capacity(RECORD_LEN);
        out.push_str(&format!("{:>2}", self.molecule_id));
        out.push(iso);
        out.push_str(&fixed(self.nu0, WAVENUMBER, 6)?);
        out.push_str(&scientific(self.intensity, INTENSITY, 3)?);
        out.push_str(&" ".repeat(EINSTEIN_A.width()));
        out.push_str(&fixed(self.gamma_air, GAMMA_AIR, 4)?);
        out.push_str(&fixed(self.gamma_self, GAMMA_SELF, 3)?);
        out.push_str(&fixed(self.e_lower, LOWER_ENERGY, 4)?);
        out.push_str(&fixed(self.n_air, N_AIR, 2)?);
        out.push_str(&fixed(self.delta_air, DELTA_AIR, 6)?);
        out.push_str(&" ".repeat(RECORD_LEN - DELTA_AIR.end));
        debug_assert_eq!(out.len(), RECORD_LEN);
        Ok(out)
    }
}

/// Lines sorted by centre wavenumber with duplicate transitions removed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LineList {
    lines: Vec<SpectralLine>,
}

impl LineList {
    /// Sorts by `nu0` and drops repeated (molecule, isotopologue, nu0, e_lower)
    /// entries, keeping the first occurrence.
    pub fn new(mut lines: Vec<SpectralLine>) -> Self {
        lines.sort_by(|a, b| a.nu0.total_cmp(&b.nu0));
        let mut kept: Vec<SpectralLine> = Vec::with_capacity(lines.len());
        for line in lines {
            let duplicate = kept
                .iter()
                .rev()
                .take_while(|k| k.nu0 == line.nu0)
                .any(|k| {
                    k.molecule_id == line.molecule_id
                        && k.isotopologue_id == line.isotopologue_id
                        && k.e_lower == line.e_lower
                });
            if !duplicate {
                kept.push(line);
            }
        }
        Self { lines: kept }
    }

    /// Parses a whole `.par` file. Blank lines are skipped.
    pub fn from_par_str(text: &str) -> std::result::Result<Self, ParseError> {
        let mut lines = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() {
                continue;
            }
            let line = parse_record(raw).map_err(|source| ParseError::AtLine {
                line: index + 1,
                source: Box::new(source),
            })?;
            lines.push(line);
        }
        Ok(Self::new(lines))
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Lines of one molecule with `nu_min ≤ nu0 ≤ nu_max`, order preserved.
    pub fn select_window(&self, nu_min: f64, nu_max: f64, molecule_id: u8) -> Result<LineList> {
        if !(nu_min < nu_max) {
            return domain(format!("empty window [{nu_min}, {nu_max}]"));
        }
        let lines = self
            .lines
            .iter()
            .filter(|l| l.molecule_id == molecule_id && l.nu0 >= nu_min && l.nu0 <= nu_max)
            .copied()
            .collect();
        Ok(Self { lines })
    }

    /// Line whose centre is closest to `nu`.
    pub fn nearest(&self, nu: f64) -> Option<&SpectralLine> {
        self.lines
            .iter()
            .min_by(|a, b| (a.nu0 - nu).abs().total_cmp(&(b.nu0 - nu).abs()))
    }
}

impl FromIterator<SpectralLine> for LineList {
    fn from_iter<I: IntoIterator<Item = SpectralLine>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P9: &str = "261 6534.363400 1.189E-20 1.372E+01.07710.146  105.88230.75-.007900     1 0 1 0 0      0 0 0 0 0                       P  9e   465332 3 3 3 2 1 1    17.0   57.0";

    fn p9() -> SpectralLine {
        parse_record(P9).unwrap()
    }

    fn with_field(record: &str, field: Field, text: &str) -> String {
        assert_eq!(text.len(), field.width());
        let mut s = record.to_string();
        s.replace_range(field.start..field.end, text);
        s
    }

    #[test]
    fn parses_fixture_record() {
        assert_eq!(P9.len(), RECORD_LEN);
        let line = p9();
        assert_eq!(line.molecule_id, 26);
        assert_eq!(line.isotopologue_id, 1);
        assert_eq!(line.nu0, 6534.3634);
        assert_eq!(line.intensity, 1.189e-20);
        assert_eq!(line.gamma_air, 0.0771);
        assert_eq!(line.gamma_self, 0.146);
        assert_eq!(line.e_lower, 105.8823);
        assert_eq!(line.n_air, 0.75);
        assert_eq!(line.delta_air, -0.0079);
    }

    #[test]
    fn length_is_checked() {
        assert_eq!(
            parse_record(&P9[..159]),
            Err(ParseError::WrongLength { found: 159 })
        );
        assert_eq!(
            parse_record(&format!("{P9} ")),
            Err(ParseError::WrongLength { found: 161 })
        );
        assert!(parse_record(&format!("{P9}\r\n")).is_ok());
    }

    #[test]
    fn blank_padded_exponent() {
        let record = with_field(P9, INTENSITY, "1.000E-20 ");
        assert_eq!(parse_record(&record).unwrap().intensity, 1.0e-20);
        let record = with_field(P9, INTENSITY, "1.000E -20");
        assert_eq!(parse_record(&record).unwrap().intensity, 1.0e-20);
        let record = with_field(P9, INTENSITY, " 1.000D-20");
        assert_eq!(parse_record(&record).unwrap().intensity, 1.0e-20);
    }

    #[test]
    fn field_errors_name_the_columns() {
        let record = with_field(P9, GAMMA_SELF, "0.1x6");
        let err = parse_record(&record).unwrap_err();
        assert!(matches!(err, ParseError::Field { field, .. } if field == GAMMA_SELF));
        assert!(err.to_string().contains("columns 41-45"), "{err}");

        let record = with_field(P9, WAVENUMBER, "         inf");
        assert!(matches!(
            parse_record(&record),
            Err(ParseError::Field { field, .. }) if field == WAVENUMBER
        ));
        let record = with_field(P9, N_AIR, "    ");
        assert!(matches!(
            parse_record(&record),
            Err(ParseError::Field { field, .. }) if field == N_AIR
        ));
    }

    #[test]
    fn non_physical_values_are_rejected() {
        let record = with_field(P9, GAMMA_AIR, ".0000");
        assert!(matches!(
            parse_record(&record),
            Err(ParseError::Invalid { field, .. }) if field == GAMMA_AIR
        ));
        let record = with_field(P9, INTENSITY, "-1.00E-20 ");
        assert!(matches!(
            parse_record(&record),
            Err(ParseError::Invalid { field, .. }) if field == INTENSITY
        ));
    }

    #[test]
    fn isotopologue_codes() {
        for (code, id) in [("1", 1), ("9", 9), ("0", 10), ("A", 11), ("B", 12)] {
            let record = with_field(P9, ISOTOPOLOGUE, code);
            assert_eq!(parse_record(&record).unwrap().isotopologue_id, id);
            assert_eq!(isotopologue_code(id).unwrap().to_string(), code);
        }
        let record = with_field(P9, ISOTOPOLOGUE, " ");
        assert!(parse_record(&record).is_err());
    }

    #[test]
    fn non_ascii_input_is_an_error() {
        let mut bytes = P9.as_bytes().to_vec();
        bytes[20] = 0xC3;
        assert_eq!(
            parse_record_bytes(&bytes),
            Err(ParseError::NonAscii { offset: 20 })
        );
    }

    #[test]
    fn serialization_round_trip() {
        let line = p9();
        let record = line.to_record().unwrap();
        assert_eq!(record.len(), RECORD_LEN);
        assert_eq!(parse_record(&record).unwrap(), line);
        // retained columns are reproduced verbatim, the Einstein A is blanked
        assert_eq!(&record[..25], &P9[..25]);
        assert_eq!(&record[25..35], "          ");
        assert_eq!(&record[35..67], &P9[35..67]);
        assert!(record[67..].trim().is_empty());
    }

    #[test]
    fn unrepresentable_values_fail_to_serialize() {
        let mut line = p9();
        line.gamma_air = 1.5;
        assert!(line.to_record().is_err());
        let mut line = p9();
        line.isotopologue_id = 0;
        assert!(line.to_record().is_err());
    }

    fn line_at(nu0: f64, molecule_id: u8) -> SpectralLine {
        SpectralLine {
            nu0,
            molecule_id,
            ..p9()
        }
    }

    #[test]
    fn line_list_sorts_and_dedups() {
        let list = LineList::new(vec![
            line_at(3.0, 26),
            line_at(1.0, 26),
            line_at(3.0, 26),
            line_at(2.0, 2),
        ]);
        let nus: Vec<f64> = list.lines().iter().map(|l| l.nu0).collect();
        assert_eq!(nus, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn window_selection() {
        let list = LineList::new(vec![
            line_at(1.0, 26),
            line_at(2.0, 2),
            line_at(3.0, 26),
            line_at(5.0, 26),
        ]);
        assert!(list.select_window(3.5, 4.5, 26).unwrap().is_empty());
        assert_eq!(list.select_window(0.0, 10.0, 26).unwrap().len(), 3);
        let all: LineList = list.lines().iter().copied().collect();
        assert_eq!(all, list);
        let one = list.select_window(2.5, 3.5, 26).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.lines()[0].nu0, 3.0);
        // inclusive bounds
        assert_eq!(list.select_window(3.0, 5.0, 26).unwrap().len(), 2);
        assert!(list.select_window(4.0, 4.0, 26).is_err());
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let text = format!("{P9}\n\n{}\n", &P9[..100]);
        match LineList::from_par_str(&text) {
            Err(ParseError::AtLine { line, source }) => {
                assert_eq!(line, 3);
                assert_eq!(*source, ParseError::WrongLength { found: 100 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
