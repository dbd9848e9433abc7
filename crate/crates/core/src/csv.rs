//! CSV reading and writing for relation instances.
//!
//! Format: a header of `name:sym` / `name:num` columns, then one tuple per
//! line. Lines starting with `#` are comments, except that a leading
//! `# relation: Name` comment names the relation when no schema is supplied.
//! Cells: a bare run of digits (optionally prefixed by `-`) is a number,
//! any other bare cell is a symbol, and double quotes force a symbol.

use num_bigint::BigInt;

use crate::error::{CqaError, Position, Result};
use crate::model::{AttrType, Instance, Schema, Tuple, Value};

struct Cell {
    text: String,
    quoted: bool,
    column: usize,
}

fn csv_err(line: usize, column: usize, message: impl Into<String>) -> CqaError {
    CqaError::Csv {
        at: Position { line, column },
        message: message.into(),
    }
}

fn split_line(line: &str, line_no: usize) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    loop {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let column = i + 1;
        if i < chars.len() && chars[i] == '"' {
            i += 1;
            let mut text = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(csv_err(line_no, column, "unterminated quoted cell")),
                    Some('"') if chars.get(i + 1) == Some(&'"') => {
                        text.push('"');
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&c) => {
                        text.push(c);
                        i += 1;
                    }
                }
            }
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i < chars.len() && chars[i] != ',' {
                return Err(csv_err(line_no, i + 1, "unexpected text after quoted cell"));
            }
            cells.push(Cell {
                text,
                quoted: true,
                column,
            });
        } else {
            let start = i;
            while i < chars.len() && chars[i] != ',' {
                if chars[i] == '"' {
                    return Err(csv_err(line_no, i + 1, "quote inside a bare cell"));
                }
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            cells.push(Cell {
                text: text.trim_end().to_string(),
                quoted: false,
                column,
            });
        }
        if i < chars.len() {
            // chars[i] == ','
            i += 1;
        } else {
            break;
        }
    }
    Ok(cells)
}

fn is_integer_token(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

fn parse_cell(cell: &Cell, ty: AttrType, attr: &str, line: usize) -> Result<Value> {
    let natural = if cell.quoted {
        AttrType::Sym
    } else if is_integer_token(&cell.text) {
        AttrType::Num
    } else {
        AttrType::Sym
    };
    if natural != ty {
        return Err(csv_err(
            line,
            cell.column,
            format!(
                "cell `{}` is {natural} but attribute {attr} is {ty}",
                cell.text
            ),
        ));
    }
    match ty {
        AttrType::Num => {
            let n: BigInt = cell
                .text
                .parse()
                .map_err(|_| csv_err(line, cell.column, "malformed integer"))?;
            Ok(Value::Num(n))
        }
        AttrType::Sym => {
            if !cell.quoted && cell.text.is_empty() {
                return Err(csv_err(line, cell.column, "empty cell (quote it to mean the empty symbol)"));
            }
            Ok(Value::sym(&cell.text))
        }
    }
}

struct Body<'a> {
    relation: Option<String>,
    header: Option<(usize, Vec<Cell>)>,
    rows: Vec<(usize, &'a str)>,
}

fn split_body(text: &str) -> Result<Body<'_>> {
    let mut relation = None;
    let mut header = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if header.is_none() {
                if let Some(name) = comment.trim().strip_prefix("relation:") {
                    relation = Some(name.trim().to_string());
                }
            }
            continue;
        }
        if header.is_none() {
            header = Some((line_no, split_line(raw, line_no)?));
        } else {
            rows.push((line_no, raw));
        }
    }
    Ok(Body {
        relation,
        header,
        rows,
    })
}

fn header_field(cell: &Cell) -> (&str, Option<&str>) {
    match cell.text.split_once(':') {
        Some((name, ty)) => (name.trim(), Some(ty.trim())),
        None => (cell.text.trim(), None),
    }
}

fn read_rows(schema: &Schema, columns: &[usize], rows: &[(usize, &str)]) -> Result<Instance> {
    let mut tuples = Vec::with_capacity(rows.len());
    for &(line_no, raw) in rows {
        let cells = split_line(raw, line_no)?;
        if cells.len() != columns.len() {
            return Err(csv_err(
                line_no,
                1,
                format!("expected {} cells, found {}", columns.len(), cells.len()),
            ));
        }
        let mut values = vec![None; schema.arity()];
        for (cell, &pos) in cells.iter().zip(columns) {
            let attr = &schema.attributes()[pos];
            values[pos] = Some(parse_cell(cell, attr.ty, &attr.name, line_no)?);
        }
        tuples.push(Tuple::new(values.into_iter().map(Option::unwrap).collect()));
    }
    Instance::new(schema.clone(), tuples)
}

/// Parses CSV text against a known schema. The header must name every
/// attribute exactly once (any order); `:type` suffixes are optional but must
/// agree with the schema when present. Duplicate rows collapse.
pub fn parse_instance(csv_text: &str, schema: &Schema) -> Result<Instance> {
    let body = split_body(csv_text)?;
    let Some((header_line, header)) = body.header else {
        return Err(csv_err(1, 1, "missing header row"));
    };
    let mut columns = Vec::with_capacity(header.len());
    for cell in &header {
        let (name, ty) = header_field(cell);
        let pos = schema.position(name).ok_or_else(|| {
            csv_err(
                header_line,
                cell.column,
                format!("unknown attribute `{name}` for {}", schema.relation()),
            )
        })?;
        if let Some(ty) = ty {
            if AttrType::parse(ty) != Some(schema.attr_type(pos)) {
                return Err(csv_err(
                    header_line,
                    cell.column,
                    format!("attribute `{name}` declared `{ty}` but schema says {}", schema.attr_type(pos)),
                ));
            }
        }
        if columns.contains(&pos) {
            return Err(csv_err(header_line, cell.column, format!("duplicate column `{name}`")));
        }
        columns.push(pos);
    }
    if columns.len() != schema.arity() {
        return Err(csv_err(
            header_line,
            1,
            format!(
                "header has {} columns but {} has arity {}",
                columns.len(),
                schema.relation(),
                schema.arity()
            ),
        ));
    }
    read_rows(schema, &columns, &body.rows)
}

/// Parses CSV text whose typed header defines the schema. The relation name
/// comes from a `# relation: Name` comment, falling back to `default_relation`.
pub fn read_instance(csv_text: &str, default_relation: &str) -> Result<Instance> {
    let body = split_body(csv_text)?;
    let Some((header_line, header)) = body.header else {
        return Err(csv_err(1, 1, "missing header row"));
    };
    let mut attrs = Vec::with_capacity(header.len());
    for cell in &header {
        let (name, ty) = header_field(cell);
        let ty = ty
            .and_then(AttrType::parse)
            .ok_or_else(|| csv_err(header_line, cell.column, format!("header cell `{}` must be `name:sym` or `name:num`", cell.text)))?;
        attrs.push((name.to_string(), ty));
    }
    let relation = body
        .relation
        .unwrap_or_else(|| default_relation.to_string());
    let schema = Schema::new(relation, attrs)?;
    let columns: Vec<usize> = (0..schema.arity()).collect();
    read_rows(&schema, &columns, &body.rows)
}

fn render_cell(v: &Value) -> String {
    match v {
        Value::Num(n) => n.to_string(),
        Value::Sym(s) => {
            let needs_quotes = s.is_empty()
                || is_integer_token(s)
                || s.contains([',', '"', '#'])
                || s.trim() != &**s;
            if needs_quotes {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        }
    }
}

/// Writes an instance as CSV with a relation comment and a typed header.
/// Rows come out in canonical tuple order.
pub fn serialize_instance(instance: &Instance) -> String {
    let schema = instance.schema();
    let mut out = format!("# relation: {}\n", schema.relation());
    let header: Vec<String> = schema
        .attributes()
        .iter()
        .map(|a| format!("{}:{}", a.name, a.ty))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for t in instance.tuples() {
        let cells: Vec<String> = t.values().iter().map(render_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERSON: &str = "\
# Example person table
Name:sym,City:sym,Street:sym
Brown,Amherst,115 Klein
Brown,Amherst,120 Maple
Green,Clarence,4000 Transit
";

    fn person_schema() -> Schema {
        Schema::new(
            "Person",
            [
                ("Name", AttrType::Sym),
                ("City", AttrType::Sym),
                ("Street", AttrType::Sym),
            ],
        )
        .unwrap()
    }

    #[test]
    fn person_rows_parse() {
        let r = parse_instance(PERSON, &person_schema()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.contains(&Tuple::new(vec![
            "Green".into(),
            "Clarence".into(),
            "4000 Transit".into()
        ])));
    }

    #[test]
    fn header_only_gives_empty_instance() {
        let r = parse_instance("Name:sym,City:sym,Street:sym\n", &person_schema()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn identical_rows_collapse() {
        let r = parse_instance("Name,City,Street\na,b,c\na,b,c\n", &person_schema()).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let schema = Schema::new("R", [("A", AttrType::Num), ("B", AttrType::Sym)]).unwrap();
        match parse_instance("A:num,B:sym\n1,x\nfoo,y\n", &schema) {
            Err(CqaError::Csv { at, .. }) => assert_eq!((at.line, at.column), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_instance("A:num,B:sym\n1,x,z\n", &schema) {
            Err(CqaError::Csv { at, .. }) => assert_eq!(at.line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_instance("A:num,C:sym\n", &schema).is_err());
        assert!(parse_instance("A:num,B:num\n", &schema).is_err());
    }

    #[test]
    fn quoting_forces_symbols() {
        let schema = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap();
        let r = parse_instance("A,B\n\"12\",-4\n", &schema).unwrap();
        assert_eq!(r.tuple(0).values(), &[Value::sym("12"), Value::num(-4)]);
        assert!(parse_instance("A,B\n12,4\n", &schema).is_err());
    }

    #[test]
    fn read_instance_takes_relation_from_comment() {
        let r = read_instance(PERSON.replace("# Example", "# relation: Person\n#").as_str(), "X").unwrap();
        assert_eq!(r.schema().relation(), "Person");
        let r = read_instance(PERSON, "People").unwrap();
        assert_eq!(r.schema().relation(), "People");
    }

    #[test]
    fn serialize_round_trips_awkward_symbols() {
        let schema = Schema::new("R", [("A", AttrType::Sym), ("B", AttrType::Num)]).unwrap();
        let tuples = ["7", "a,b", "say \"hi\"", " pad", "#x", ""]
            .iter()
            .enumerate()
            .map(|(i, s)| Tuple::new(vec![Value::sym(s), Value::num(i as i64 - 2)]));
        let r = Instance::new(schema, tuples).unwrap();
        let text = serialize_instance(&r);
        assert_eq!(read_instance(&text, "other").unwrap(), r);
    }
}
