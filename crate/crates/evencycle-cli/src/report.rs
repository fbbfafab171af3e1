//! Output rendering for command results.

use std::fmt::Write as _;

use crate::doc::{serialize, Document, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Documents in the line format, reports included.
    Structured,
    /// Reports as aligned text; other documents unchanged.
    Pretty,
}

fn block(out: &mut String, fields: &[(String, String)]) {
    let width = fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in fields {
        writeln!(out, "  {k:<width$}  {v}").unwrap();
    }
}

pub fn pretty(r: &Report) -> String {
    let mut out = format!("{}: {}\n", r.title, r.status);
    block(&mut out, &r.fields);
    for item in &r.items {
        writeln!(out, "{}", item.name).unwrap();
        block(&mut out, &item.fields);
    }
    out
}

/// `notes` become leading comment lines; documents are separated by blank
/// lines.
pub fn render(notes: &[String], docs: &[Document], format: Format) -> String {
    let mut out: String = notes.iter().map(|n| format!("# {n}\n")).collect();
    let parts: Vec<String> = docs
        .iter()
        .map(|d| match (d, format) {
            (Document::Report(r), Format::Pretty) => pretty(r),
            _ => serialize(d),
        })
        .collect();
    out.push_str(&parts.join("\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::parse_stream;

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("search-siblings", "pass");
        assert_eq!(render(&[], &[Document::Report(r.clone())], Format::Pretty), "search-siblings: pass\n");
        assert_eq!(serialize(&Document::Report(r)), "report search-siblings\nstatus pass\n");
    }

    #[test]
    fn pretty_aligns_fields() {
        let mut r = Report::new("classify", "pass");
        r.field("records", 1);
        r.item("record 1").field("tags", "nova").field("witness", "w-star {0, 1}");
        let text = pretty(&r);
        assert_eq!(text, "classify: pass\n  records  1\nrecord 1\n  tags     nova\n  witness  w-star {0, 1}\n");
    }

    #[test]
    fn structured_output_parses_back() {
        let mut r = Report::new("x", "pass");
        r.field("a", "b c");
        let docs = vec![Document::Report(r), Document::Report(Report::new("y", "fail"))];
        let text = render(&["note".into()], &docs, Format::Structured);
        assert_eq!(parse_stream(&text).unwrap(), docs);
    }
}
