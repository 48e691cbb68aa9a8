use crate::pddl::Atom;

use super::Excuse;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderStyle {
    /// Display-convention lines built from the added atoms, e.g.
    /// `Open PinkDrawer`. Falls back to `- name(args)` lines when the edit
    /// only removes atoms.
    PositiveOnly,
    /// `+ name(args)` / `- name(args)` lines for the full symmetric
    /// difference.
    FullDiff,
}

/// Renders an excuse for human presentation; byte-identical for identical
/// excuses.
pub fn render_excuse(excuse: &Excuse, style: RenderStyle) -> String {
    match style {
        RenderStyle::PositiveOnly => {
            if excuse.adds.is_empty() {
                return excuse
                    .removes
                    .iter()
                    .map(|a| format!("- {}", a.functional()))
                    .collect::<Vec<_>>()
                    .join("\n");
            }
            excuse.adds.iter().map(display_line).collect::<Vec<_>>().join("\n")
        }
        RenderStyle::FullDiff => {
            let mut lines: Vec<String> =
                excuse.adds.iter().map(|a| format!("+ {}", a.functional())).collect();
            lines.extend(excuse.removes.iter().map(|a| format!("- {}", a.functional())));
            lines.join("\n")
        }
    }
}

fn display_line(atom: &Atom) -> String {
    let mut parts = vec![camelize(atom.pred.as_str())];
    parts.extend(atom.args.iter().map(|a| camelize(a.as_str())));
    parts.join(" ")
}

/// `pink-drawer` -> `PinkDrawer`, matching the display convention used for
/// on-screen guidance.
fn camelize(name: &str) -> String {
    name.split(['-', '_'])
        .filter(|s| !s.is_empty())
        .map(|seg| {
            let mut chars = seg.chars();
            match chars.next() {
                Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
                None => String::new(),
            }
        })
        .collect()
}
