//! A flattened view of an HTML page's element tree.
//!
//! [`PageDom`] parses a page once (error-tolerantly, with the standard HTML
//! tree-construction rules) and exposes what the rest of the pipeline needs:
//! element nodes in preorder with their rendered text, the text runs with
//! their enclosing element, and a few ancestry queries. `<script>` and
//! `<style>` subtrees are dropped at parse time — nothing downstream should
//! ever see JavaScript source as "rendered text".

use scraper::{Html, Node};

/// One element of the page, indexed by its preorder position.
#[derive(Debug, Clone)]
pub struct DomNode {
    /// Preorder index; stable for a given page.
    pub node_id: usize,
    /// Lowercase element name (`div`, `code`, ...).
    pub tag: String,
    /// Parent element, if any (the document root has none).
    pub parent: Option<usize>,
    /// Child *elements* in document order, as node ids.
    pub children: Vec<usize>,
    /// Concatenated text of all descendant text nodes, in document order,
    /// with `<script>`/`<style>` subtrees removed. Verbatim — whitespace
    /// comes straight from the source.
    pub rendered_text: String,
    /// True for `<a>` elements carrying an `href` attribute.
    pub(crate) is_link: bool,
}

/// One text node, attached to its nearest enclosing element.
#[derive(Debug, Clone)]
pub struct TextRun {
    /// Verbatim text content.
    pub content: String,
    /// Node id of the enclosing element.
    pub element: usize,
}

/// Context of a text run, derived from its element ancestry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunContext {
    /// Inside an `<a href=...>` element.
    pub clickable: bool,
    /// Inside a `<code>` element.
    pub in_code_tag: bool,
    /// Inside an element whose own rendered text parses as a JSON object
    /// or array.
    pub within_json: bool,
}

#[derive(Debug)]
pub struct PageDom {
    nodes: Vec<DomNode>,
    text_runs: Vec<TextRun>,
    /// For each node: does its trimmed rendered text parse as a JSON
    /// object or array?
    json_text: Vec<bool>,
    /// Concatenation of all text runs (the page's rendered text).
    page_text: String,
    /// Byte offset of each text run inside `page_text`.
    run_offsets: Vec<usize>,
}

impl PageDom {
    /// Parse a page. Never fails: malformed HTML is repaired the way
    /// browsers repair it.
    pub fn parse(html: &str) -> PageDom {
        let doc = Html::parse_document(html);
        let mut dom = PageDom {
            nodes: Vec::new(),
            text_runs: Vec::new(),
            json_text: Vec::new(),
            page_text: String::new(),
            run_offsets: Vec::new(),
        };
        for child in doc.tree.root().children() {
            dom.walk(child, None);
        }
        dom.json_text = dom
            .nodes
            .iter()
            .map(|n| {
                let t = n.rendered_text.trim();
                (t.starts_with('{') || t.starts_with('['))
                    && serde_json::from_str::<serde_json::Value>(t)
                        .map(|v| v.is_object() || v.is_array())
                        .unwrap_or(false)
            })
            .collect();
        let mut offset = 0;
        for run in &dom.text_runs {
            dom.run_offsets.push(offset);
            offset += run.content.len();
            dom.page_text.push_str(&run.content);
        }
        dom
    }

    /// Walk one tree node, returning the rendered text of its subtree.
    fn walk(&mut self, node: ego_tree::NodeRef<'_, Node>, parent: Option<usize>) -> String {
        match node.value() {
            Node::Element(el) => {
                let tag = el.name().to_ascii_lowercase();
                if tag == "script" || tag == "style" {
                    return String::new();
                }
                let id = self.nodes.len();
                self.nodes.push(DomNode {
                    node_id: id,
                    tag: tag.clone(),
                    parent,
                    children: Vec::new(),
                    rendered_text: String::new(),
                    is_link: tag == "a" && el.attr("href").is_some(),
                });
                if let Some(p) = parent {
                    self.nodes[p].children.push(id);
                }
                let mut text = String::new();
                for child in node.children() {
                    text.push_str(&self.walk(child, Some(id)));
                }
                self.nodes[id].rendered_text = text.clone();
                text
            }
            Node::Text(t) => {
                // Text floating outside any element (stray bytes before
                // <html>) has no context and is ignored.
                if let Some(p) = parent {
                    self.text_runs.push(TextRun {
                        content: t.to_string(),
                        element: p,
                    });
                    t.to_string()
                } else {
                    String::new()
                }
            }
            _ => {
                // Comments, doctypes, processing instructions render nothing;
                // document/fragment wrappers only relay their children.
                let mut text = String::new();
                for child in node.children() {
                    text.push_str(&self.walk(child, parent));
                }
                text
            }
        }
    }

    pub fn nodes(&self) -> &[DomNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &DomNode {
        &self.nodes[id]
    }

    pub fn text_runs(&self) -> &[TextRun] {
        &self.text_runs
    }

    /// The whole page's rendered text (all runs concatenated).
    pub fn page_text(&self) -> &str {
        &self.page_text
    }

    /// The text run covering a byte offset of [`PageDom::page_text`].
    pub fn run_at(&self, offset: usize) -> &TextRun {
        let idx = self.run_offsets.partition_point(|&o| o <= offset);
        &self.text_runs[idx.saturating_sub(1)]
    }

    /// True when `a` is a strict ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.nodes[b].parent;
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.nodes[p].parent;
        }
        false
    }

    /// Position of `id` among its parent's element children; 0 for roots.
    pub fn child_index(&self, id: usize) -> usize {
        match self.nodes[id].parent {
            Some(p) => self.nodes[p]
                .children
                .iter()
                .position(|&c| c == id)
                .expect("child listed under its parent"),
            None => 0,
        }
    }

    /// Ancestry-derived context for the text run at `run` (by element id).
    pub fn context_of(&self, element: usize) -> RunContext {
        let mut ctx = RunContext {
            clickable: false,
            in_code_tag: false,
            within_json: false,
        };
        let mut cur = Some(element);
        while let Some(id) = cur {
            let node = &self.nodes[id];
            ctx.clickable |= node.is_link;
            ctx.in_code_tag |= node.tag == "code";
            ctx.within_json |= self.json_text[id];
            cur = node.parent;
        }
        ctx
    }
}
