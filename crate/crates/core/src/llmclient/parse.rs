use std::collections::BTreeSet;

use super::LlmError;
use crate::taxonomy::Label;

const QUOTES: &[char] = &['"', '\'', '`', '\u{201c}', '\u{201d}', '\u{2018}', '\u{2019}'];

fn split_items(content: &str) -> impl Iterator<Item = &str> {
    content.split([',', '\u{ff0c}', '\u{3001}']).map(|s| s.trim().trim_matches(QUOTES).trim())
}

/// Longest entry, in words, accepted from an unbracketed comma line.
const MAX_BARE_WORDS: usize = 4;

fn looks_like_prose(item: &str) -> bool {
    item.contains(['.', '!', '?', ':']) || item.split_whitespace().count() > MAX_BARE_WORDS
}

/// Extracts a label set from the first bracketed list in `text`, or failing
/// that from the first line containing a comma. Blank entries are skipped
/// and `[]` is the empty set. A comma line whose entries read like sentences
/// is not a list.
pub fn parse_label_list(text: &str) -> Result<BTreeSet<Label>, LlmError> {
    let content = if let Some(open) = text.find('[') {
        let rest = &text[open + 1..];
        let close = rest.find(']').ok_or_else(|| LlmError::parse("unclosed '['", text))?;
        let inner = &rest[..close];
        if inner.contains('[') {
            return Err(LlmError::parse("nested list where a flat list was expected", text));
        }
        inner
    } else {
        let line = text.lines().find(|l| l.contains(',')).ok_or_else(|| LlmError::parse("no list found", text))?;
        if split_items(line).any(looks_like_prose) {
            return Err(LlmError::parse("comma-separated line reads as prose", text));
        }
        line
    };
    Ok(split_items(content).filter(|s| !s.is_empty()).filter_map(|s| Label::new(s).ok()).collect())
}

/// Inverse of [`parse_label_list`] on normalized sets.
pub fn format_label_list(labels: &BTreeSet<Label>) -> String {
    let items: Vec<&str> = labels.iter().map(Label::as_str).collect();
    format!("[{}]", items.join(", "))
}

/// Reads the first list of lists in `text`. Group validity (overlaps, empty
/// groups) is left to the partition loader.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<Label>>, LlmError> {
    let open = text.find('[').ok_or_else(|| LlmError::parse("no list found", text))?;
    let mut rest = &text[open + 1..];
    let mut groups = Vec::new();
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        if rest.starts_with(']') {
            break;
        }
        let Some(r) = rest.strip_prefix('[') else {
            return Err(LlmError::parse("expected '[' opening a group", text));
        };
        let close = r.find(']').ok_or_else(|| LlmError::parse("unclosed group", text))?;
        let inner = &r[..close];
        if inner.contains('[') {
            return Err(LlmError::parse("groups nest deeper than two levels", text));
        }
        let mut group = Vec::new();
        if !inner.trim().is_empty() {
            for item in split_items(inner) {
                let label =
                    Label::new(item).map_err(|_| LlmError::parse("label empty after normalization", text))?;
                group.push(label);
            }
        }
        groups.push(group);
        rest = &r[close + 1..];
    }
    Ok(groups)
}

/// Partition file text (a JSON list of lists) for parsed groups, in the
/// order given.
pub fn partition_document(groups: &[Vec<Label>]) -> String {
    let mut out = String::from("[\n");
    for (i, g) in groups.iter().enumerate() {
        let items: Vec<&str> = g.iter().map(Label::as_str).collect();
        out.push_str("  ");
        out.push_str(&serde_json::to_string(&items).expect("strings serialize"));
        out.push_str(if i + 1 < groups.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

fn is_separator_row(cells: &[&str]) -> bool {
    cells.iter().all(|c| !c.is_empty() && c.chars().all(|ch| matches!(ch, '-' | ':' | ' ')))
}

/// Collects every label mentioned in the body rows of a markdown table.
/// Cells may hold several comma- or slash-separated entries.
pub fn parse_table_members(text: &str) -> Result<BTreeSet<Label>, LlmError> {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| l.starts_with('|'))
        .map(|l| l.trim_matches('|').split('|').map(str::trim).collect())
        .collect();
    if rows.is_empty() {
        return Err(LlmError::parse("no table found", text));
    }
    let mut out = BTreeSet::new();
    let body = rows.iter().skip(1).filter(|r| !is_separator_row(r));
    for row in body {
        for cell in row {
            for item in cell.split('/').flat_map(split_items) {
                if let Ok(l) = Label::new(item) {
                    out.insert(l);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(LlmError::parse("table has no body rows", text));
    }
    Ok(out)
}
