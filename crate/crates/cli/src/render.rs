use std::io::{self, Write};

use goldbach_core::bound::{self, Rational, Scope};
use goldbach_core::partition;
use goldbach_core::primes::build_table;
use serde_json::{json, Map, Value};

use crate::{Failure, Format};

/// One output field. Fractions stay exact: `num/den` in plain text, two
/// integer columns in csv and jsonl.
pub enum Val {
    Int(u64),
    Bool(bool),
    Text(String),
    Frac(Rational),
    Missing,
}

type Row = Vec<(String, Val)>;

pub struct Echo {
    command: &'static str,
    fields: Vec<(&'static str, u64)>,
}

impl Echo {
    pub fn new(command: &'static str) -> Self {
        Self { command, fields: Vec::new() }
    }

    pub fn field(mut self, key: &'static str, value: u64) -> Self {
        self.fields.push((key, value));
        self
    }
}

pub struct Renderer<'a> {
    out: &'a mut dyn Write,
    format: Format,
    header_written: bool,
}

impl<'a> Renderer<'a> {
    pub fn new(out: &'a mut dyn Write, format: Format) -> Self {
        Self { out, format, header_written: false }
    }

    pub fn echo(&mut self, echo: &Echo) -> io::Result<()> {
        match self.format {
            Format::Plain | Format::Csv => {
                write!(self.out, "# goldbach {}", echo.command)?;
                for (k, v) in &echo.fields {
                    write!(self.out, " {k}={v}")?;
                }
                writeln!(self.out, " format={}", self.format.name())
            }
            Format::Jsonl => {
                let mut cfg = Map::new();
                cfg.insert("command".into(), echo.command.into());
                for (k, v) in &echo.fields {
                    cfg.insert((*k).into(), (*v).into());
                }
                cfg.insert("format".into(), "jsonl".into());
                writeln!(self.out, "{}", json!({ "config": cfg }))
            }
        }
    }

    fn comment(&mut self, text: &str) -> io::Result<()> {
        if self.format != Format::Jsonl {
            writeln!(self.out, "# {text}")?;
        }
        Ok(())
    }

    pub fn row(&mut self, row: &Row) -> io::Result<()> {
        match self.format {
            Format::Plain => {
                let parts: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
                writeln!(self.out, "{}", parts.join(" "))
            }
            Format::Csv => {
                if !self.header_written {
                    let header: Vec<String> = row.iter().flat_map(|(k, v)| csv_keys(k, v)).collect();
                    writeln!(self.out, "{}", header.join(","))?;
                    self.header_written = true;
                }
                let cells: Vec<String> = row.iter().flat_map(|(k, v)| csv_cells(k, v)).collect();
                writeln!(self.out, "{}", cells.join(","))
            }
            Format::Jsonl => {
                let mut obj = Map::new();
                for (k, v) in row {
                    json_insert(&mut obj, k, v);
                }
                writeln!(self.out, "{}", Value::Object(obj))
            }
        }
    }
}

fn plain(v: &Val) -> String {
    match v {
        Val::Int(i) => i.to_string(),
        Val::Bool(b) => b.to_string(),
        Val::Text(s) => s.clone(),
        Val::Frac(r) => format!("{}/{}", r.numer(), r.denom()),
        Val::Missing => "-".into(),
    }
}

fn csv_keys(k: &str, v: &Val) -> Vec<String> {
    match v {
        Val::Frac(_) => vec![format!("{k}_num"), format!("{k}_den")],
        Val::Missing if k.starts_with("A_") => vec![format!("{k}_num"), format!("{k}_den")],
        _ => vec![k.to_string()],
    }
}

fn csv_cells(k: &str, v: &Val) -> Vec<String> {
    match v {
        Val::Frac(r) => vec![r.numer().to_string(), r.denom().to_string()],
        Val::Missing => vec![String::new(); csv_keys(k, v).len()],
        other => vec![plain(other)],
    }
}

fn json_number(digits: String) -> Value {
    serde_json::from_str(&digits).expect("integer digits are valid json")
}

fn json_insert(obj: &mut Map<String, Value>, k: &str, v: &Val) {
    match v {
        Val::Int(i) => {
            obj.insert(k.into(), (*i).into());
        }
        Val::Bool(b) => {
            obj.insert(k.into(), (*b).into());
        }
        Val::Text(s) => {
            obj.insert(k.into(), s.clone().into());
        }
        Val::Frac(r) => {
            obj.insert(format!("{k}_num"), json_number(r.numer().to_string()));
            obj.insert(format!("{k}_den"), json_number(r.denom().to_string()));
        }
        Val::Missing => {
            obj.insert(k.into(), Value::Null);
        }
    }
}

fn kv(k: &str, v: Val) -> (String, Val) {
    (k.to_string(), v)
}

fn join(primes: &[u64]) -> String {
    if primes.is_empty() {
        return "-".into();
    }
    primes.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(msg.into())
}

pub fn table(r: &mut Renderer<'_>, n1_max: u64, prime_max: u64) -> Result<(), Failure> {
    if n1_max < 3 {
        return Err(usage(format!("n1_max must be at least 3, got {n1_max}")));
    }
    if prime_max < 3 {
        return Err(usage(format!("prime_max must be at least 3, got {prime_max}")));
    }
    let primes_table = build_table(prime_max)?;
    let primes = primes_table.odd_primes_up_to(prime_max).to_vec();
    let heads: Vec<String> = primes.iter().map(|p| format!("r({p})")).collect();

    if r.format == Format::Plain {
        r.comment(&format!("n1: {}", heads.join(" ")))?;
    }
    for n1 in (3..=n1_max).step_by(2) {
        let row = partition::residue_row(n1, &primes)?;
        match r.format {
            Format::Plain => {
                let cells: Vec<String> = row.residues.values().map(u64::to_string).collect();
                writeln!(r.out, "{n1}: {}", cells.join(" "))?;
            }
            _ => {
                let mut out = vec![kv("n1", Val::Int(n1))];
                out.extend(row.residues.iter().map(|(p, v)| (format!("r{p}"), Val::Int(*v))));
                r.row(&out)?;
            }
        }
    }
    Ok(())
}

pub fn count(r: &mut Renderer<'_>, q: u64) -> Result<(), Failure> {
    let table = build_table(q.max(2))?;
    let p = partition::profile(q, &table)?;
    r.row(&vec![
        kv("q", Val::Int(p.q)),
        kv("n", Val::Int(p.n)),
        kv("goldbach_ordered", Val::Int(p.goldbach_ordered)),
        kv("goldbach_unordered", Val::Int(p.goldbach_unordered)),
        kv("admissible_count", Val::Int(p.admissible_count)),
        kv("predicate_cutoff", Val::Int(p.predicate_cutoff)),
        kv("special", Val::Text(if q == 4 { "q4" } else { "none" }.into())),
    ])?;
    Ok(())
}

pub fn partitions(r: &mut Renderer<'_>, q: u64) -> Result<(), Failure> {
    let table = build_table(q.max(2))?;
    for e in partition::enumerate_partitions(q, &table)? {
        r.row(&vec![
            kv("n1", Val::Int(e.n1)),
            kv("n2", Val::Int(e.n2)),
            kv("admissible", Val::Bool(e.admissible)),
            kv("prime_pair", Val::Bool(e.prime_pair)),
        ])?;
    }
    Ok(())
}

pub fn bound(r: &mut Renderer<'_>, q: u64) -> Result<(), Failure> {
    let table = build_table(q.isqrt().max(2))?;
    let b = bound::bound_a(q, &table)?;
    let (three_five, scope) = bound::bound_a_three_five(q)?;
    r.row(&vec![
        kv("q", Val::Int(q)),
        kv("cutoff", Val::Text(join(&b.cutoff))),
        kv("p_j", Val::Int(b.p_j())),
        kv("shrink", Val::Frac(b.shrink_product.clone())),
        kv("n", Val::Int(b.n)),
        kv("sub", Val::Int(b.subtractive)),
        kv("A", Val::Frac(b.a.clone())),
        kv("A_three", Val::Frac(bound::bound_a_three(q)?)),
        kv("A_three_five", Val::Frac(three_five)),
        kv("three_five_in_scope", Val::Bool(scope == Scope::Stated)),
        kv("special", Val::Text(if b.is_empty_cutoff() { "empty_cutoff" } else { "none" }.into())),
    ])?;
    Ok(())
}

pub fn minima(r: &mut Renderer<'_>, p_lo: u64, p_hi: u64) -> Result<(), Failure> {
    if p_hi < p_lo {
        return Err(usage(format!("empty prime range [{p_lo}, {p_hi}]")));
    }
    if p_hi < 3 {
        return Err(usage("p_hi must be at least 3"));
    }
    let table = build_table(p_hi)?;
    for &p in table.odd_primes_up_to(p_hi).iter().filter(|&&p| p >= p_lo) {
        let m = bound::minima_record(p, &table)?;
        let opt_bool = |b: Option<bool>| b.map_or(Val::Missing, Val::Bool);
        r.row(&vec![
            kv("p_m", Val::Int(m.p_m)),
            kv("q", Val::Int(m.q)),
            kv("n", Val::Int(m.n)),
            kv("A_direct", Val::Frac(m.a_direct.clone())),
            kv("A_telescoped", m.a_telescoped.clone().map_or(Val::Missing, Val::Frac)),
            kv("lower_chain", Val::Frac(m.lower_chain.clone())),
            kv("forms_agree", opt_bool(m.forms_agree())),
            kv("exceeds_lower_chain", opt_bool(m.exceeds_lower_chain())),
        ])?;
    }
    Ok(())
}
