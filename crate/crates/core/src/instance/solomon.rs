//! Reader and writer for the line-oriented Solomon/Homberger VRPTW layout.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

/// A benchmark file exactly as read: header data plus the depot and customer rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVrptw {
    pub name: String,
    pub vehicles: usize,
    pub capacity: f64,
    pub depot: RawRow,
    pub customers: Vec<RawRow>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing {0} section")]
    MissingSection(&'static str),
    #[error("missing depot row")]
    MissingDepot,
    #[error("no customers")]
    NoCustomers,
}

fn line_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        message: message.into(),
    }
}

/// Parses a Solomon-layout VRPTW file.
pub fn parse_vrptw(text: &str) -> Result<RawVrptw, ParseError> {
    // (1-based line number, trimmed content) for every non-blank line.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, name) = lines.next().ok_or(ParseError::MissingSection("name"))?;
    let name = name.to_string();

    match lines.next() {
        Some((_, l)) if l.eq_ignore_ascii_case("VEHICLE") => {}
        Some((n, l)) => return Err(line_err(n, format!("expected VEHICLE section, found {l:?}"))),
        None => return Err(ParseError::MissingSection("VEHICLE")),
    }
    let (n, header) = lines.next().ok_or(ParseError::MissingSection("VEHICLE"))?;
    let upper = header.to_ascii_uppercase();
    if !(upper.contains("NUMBER") && upper.contains("CAPACITY")) {
        return Err(line_err(n, "malformed vehicle header, expected NUMBER and CAPACITY"));
    }
    let (n, fleet_line) = lines.next().ok_or(ParseError::MissingSection("VEHICLE"))?;
    let fields: Vec<&str> = fleet_line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(line_err(n, "vehicle line must hold NUMBER and CAPACITY"));
    }
    let vehicles: usize = fields[0]
        .parse()
        .map_err(|_| line_err(n, format!("non-numeric vehicle count {:?}", fields[0])))?;
    let capacity: f64 = fields[1]
        .parse()
        .map_err(|_| line_err(n, format!("non-numeric capacity {:?}", fields[1])))?;

    match lines.next() {
        Some((_, l)) if l.eq_ignore_ascii_case("CUSTOMER") => {}
        Some((n, l)) => return Err(line_err(n, format!("expected CUSTOMER section, found {l:?}"))),
        None => return Err(ParseError::MissingSection("CUSTOMER")),
    }

    let mut rows = Vec::new();
    for (n, l) in lines {
        let first = l.split_whitespace().next().unwrap_or_default();
        if rows.is_empty() && first.parse::<f64>().is_err() {
            // Column caption line(s) before the table body.
            continue;
        }
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(line_err(n, format!("expected 7 columns, found {}", fields.len())));
        }
        let mut vals = [0.0f64; 7];
        for (slot, f) in vals.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| line_err(n, format!("non-numeric field {f:?}")))?;
        }
        if vals[0] < 0.0 || vals[0].fract() != 0.0 {
            return Err(line_err(n, format!("invalid customer number {}", fields[0])));
        }
        rows.push((
            n,
            RawRow {
                id: vals[0] as usize,
                x: vals[1],
                y: vals[2],
                demand: vals[3],
                ready: vals[4],
                due: vals[5],
                service: vals[6],
            },
        ));
    }

    let mut rows = rows.into_iter();
    let (n, depot) = rows.next().ok_or(ParseError::MissingDepot)?;
    if depot.id != 0 {
        return Err(ParseError::MissingDepot);
    }
    if depot.demand != 0.0 {
        return Err(line_err(n, "depot row must have zero demand"));
    }
    let customers: Vec<RawRow> = rows.map(|(_, r)| r).collect();
    if customers.is_empty() {
        return Err(ParseError::NoCustomers);
    }
    Ok(RawVrptw {
        name,
        vehicles,
        capacity,
        depot,
        customers,
    })
}

impl RawVrptw {
    /// Renders the file in the standard Solomon layout.
    pub fn to_solomon_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}\n\nVEHICLE\nNUMBER     CAPACITY", self.name);
        let _ = writeln!(out, "  {:<10} {}\n", self.vehicles, self.capacity);
        let _ = writeln!(out, "CUSTOMER");
        let _ = writeln!(
            out,
            "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n"
        );
        for r in std::iter::once(&self.depot).chain(&self.customers) {
            let _ = writeln!(
                out,
                "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                r.id, r.x, r.y, r.demand, r.ready, r.due, r.service
            );
        }
        out
    }

    /// Keeps only the first `n` customers (the usual 25/50-customer variants).
    pub fn truncated(&self, n: usize) -> RawVrptw {
        RawVrptw {
            customers: self.customers.iter().take(n).cloned().collect(),
            ..self.clone()
        }
    }
}
