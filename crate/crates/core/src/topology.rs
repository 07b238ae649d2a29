//! Network model: routers, directed multi-wavelength links, and the
//! line-oriented topology file format.
//!
//! ```text
//! # comment
//! mode wi|spn
//! router <label> [converters=<int>] [class=reliable|unreliable]
//! link <from> <to> wavelengths=<int> [fibers=<int>] [class=reliable|unreliable]
//! ```
//!
//! Tokens are whitespace separated and labels are case-sensitive. Routers must
//! be declared before the links that reference them. Identifiers are assigned
//! in declaration order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RouterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkId(pub u32);

impl RouterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RouterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

/// A 1-based wavelength index, `1..=W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wavelength(u16);

impl Wavelength {
    /// Returns `None` for index 0.
    pub fn new(index: u16) -> Option<Self> {
        (index >= 1).then_some(Wavelength(index))
    }

    /// Wavelength for a zero-based slot.
    pub fn from_slot(slot: usize) -> Self {
        Wavelength(slot as u16 + 1)
    }

    pub fn get(self) -> u16 {
        self.0
    }

    /// Zero-based slot for array indexing.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Wavelength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliabilityClass {
    #[default]
    Reliable,
    Unreliable,
}

impl ReliabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ReliabilityClass::Reliable => "reliable",
            ReliabilityClass::Unreliable => "unreliable",
        }
    }
}

impl FromStr for ReliabilityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reliable" => Ok(ReliabilityClass::Reliable),
            "unreliable" => Ok(ReliabilityClass::Unreliable),
            other => Err(format!("unknown reliability class `{other}`")),
        }
    }
}

/// Conversion architecture of the whole network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ConversionMode {
    /// Every router converts any wavelength to any other without limit.
    #[default]
    FullConversion,
    /// Each router owns a finite converter bank shared by its lightpaths.
    SharePerNode,
}

impl ConversionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConversionMode::FullConversion => "wi",
            ConversionMode::SharePerNode => "spn",
        }
    }
}

impl FromStr for ConversionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wi" => Ok(ConversionMode::FullConversion),
            "spn" => Ok(ConversionMode::SharePerNode),
            other => Err(format!("unknown mode `{other}` (expected wi or spn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Router {
    pub id: RouterId,
    pub label: String,
    /// Size of the shared converter bank. Ignored in full-conversion mode.
    pub converter_count: u32,
    pub class: ReliabilityClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub from: RouterId,
    pub to: RouterId,
    pub fibers: u16,
    pub wavelengths: u16,
    pub class: ReliabilityClass,
}

impl Link {
    /// Total channel count `fibers × wavelengths`.
    pub fn capacity(&self) -> u32 {
        self.fibers as u32 * self.wavelengths as u32
    }
}

/// A failure-prone network element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Router(RouterId),
    Link(LinkId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Router(r) => write!(f, "{r}"),
            Element::Link(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: link endpoint `{label}` is not a declared router")]
    DanglingEndpoint { line: usize, label: String },
    #[error("duplicate router label `{0}`")]
    DuplicateRouter(String),
    #[error("duplicate link {from} -> {to}")]
    DuplicateLink { from: RouterId, to: RouterId },
    #[error("link {from} -> {to} must carry at least one wavelength")]
    NoWavelengths { from: RouterId, to: RouterId },
    #[error("link {from} -> {to} must have at least one fiber")]
    NoFibers { from: RouterId, to: RouterId },
    #[error("link from {0} to itself")]
    SelfLoop(RouterId),
    #[error("unknown router {0}")]
    UnknownRouter(RouterId),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("line {line}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<TopologyError>,
    },
}

/// Incremental topology construction with validation.
#[derive(Debug, Default)]
pub struct TopologyBuilder {
    routers: Vec<Router>,
    links: Vec<Link>,
    mode: ConversionMode,
    by_label: HashMap<String, RouterId>,
}

impl TopologyBuilder {
    pub fn new(mode: ConversionMode) -> Self {
        TopologyBuilder {
            mode,
            ..Default::default()
        }
    }

    pub fn mode(&mut self, mode: ConversionMode) -> &mut Self {
        self.mode = mode;
        self
    }

    pub fn router(
        &mut self,
        label: &str,
        converter_count: u32,
        class: ReliabilityClass,
    ) -> Result<RouterId, TopologyError> {
        if self.by_label.contains_key(label) {
            return Err(TopologyError::DuplicateRouter(label.to_string()));
        }
        let id = RouterId(self.routers.len() as u32);
        self.routers.push(Router {
            id,
            label: label.to_string(),
            converter_count,
            class,
        });
        self.by_label.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn link(
        &mut self,
        from: RouterId,
        to: RouterId,
        fibers: u16,
        wavelengths: u16,
        class: ReliabilityClass,
    ) -> Result<LinkId, TopologyError> {
        for r in [from, to] {
            if r.index() >= self.routers.len() {
                return Err(TopologyError::UnknownRouter(r));
            }
        }
        if from == to {
            return Err(TopologyError::SelfLoop(from));
        }
        if wavelengths == 0 {
            return Err(TopologyError::NoWavelengths { from, to });
        }
        if fibers == 0 {
            return Err(TopologyError::NoFibers { from, to });
        }
        if self.links.iter().any(|l| l.from == from && l.to == to) {
            return Err(TopologyError::DuplicateLink { from, to });
        }
        let id = LinkId(self.links.len() as u32);
        self.links.push(Link {
            id,
            from,
            to,
            fibers,
            wavelengths,
            class,
        });
        Ok(id)
    }

    pub fn lookup(&self, label: &str) -> Option<RouterId> {
        self.by_label.get(label).copied()
    }

    pub fn build(self) -> Topology {
        let mut out_links = vec![Vec::new(); self.routers.len()];
        let mut in_links = vec![Vec::new(); self.routers.len()];
        for l in &self.links {
            out_links[l.from.index()].push(l.id);
            in_links[l.to.index()].push(l.id);
        }
        Topology {
            routers: self.routers,
            links: self.links,
            mode: self.mode,
            out_links,
            in_links,
        }
    }
}

/// An immutable network description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    routers: Vec<Router>,
    links: Vec<Link>,
    mode: ConversionMode,
    out_links: Vec<Vec<LinkId>>,
    in_links: Vec<Vec<LinkId>>,
}

impl Topology {
    /// Parses the topology file format described in the module docs.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut b = TopologyBuilder::new(ConversionMode::FullConversion);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else {
                continue;
            };
            let at = |e: TopologyError| TopologyError::AtLine {
                line,
                source: Box::new(e),
            };
            let syntax = |message: String| TopologyError::Syntax { line, message };
            match keyword {
                "mode" => {
                    let value = tokens
                        .next()
                        .ok_or_else(|| syntax("`mode` needs a value".into()))?;
                    b.mode(value.parse().map_err(syntax)?);
                    if let Some(extra) = tokens.next() {
                        return Err(syntax(format!("unexpected token `{extra}`")));
                    }
                }
                "router" => {
                    let label = tokens
                        .next()
                        .ok_or_else(|| syntax("`router` needs a label".into()))?;
                    let mut converters = 0u32;
                    let mut class = ReliabilityClass::Reliable;
                    for tok in tokens {
                        match split_kv(tok).map_err(syntax)? {
                            ("converters", v) => converters = parse_int(v, line)?,
                            ("class", v) => class = v.parse().map_err(syntax)?,
                            (k, _) => return Err(syntax(format!("unknown router key `{k}`"))),
                        }
                    }
                    b.router(label, converters, class).map_err(at)?;
                }
                "link" => {
                    let mut endpoint = || -> Result<RouterId, TopologyError> {
                        let label = tokens
                            .next()
                            .ok_or_else(|| syntax("`link` needs two endpoints".into()))?;
                        b.lookup(label)
                            .ok_or_else(|| TopologyError::DanglingEndpoint {
                                line,
                                label: label.to_string(),
                            })
                    };
                    let from = endpoint()?;
                    let to = endpoint()?;
                    let mut fibers = 1u16;
                    let mut wavelengths = None;
                    let mut class = ReliabilityClass::Reliable;
                    for tok in tokens {
                        match split_kv(tok).map_err(syntax)? {
                            ("fibers", v) => fibers = parse_int(v, line)?,
                            ("wavelengths", v) => wavelengths = Some(parse_int(v, line)?),
                            ("class", v) => class = v.parse().map_err(syntax)?,
                            (k, _) => return Err(syntax(format!("unknown link key `{k}`"))),
                        }
                    }
                    let wavelengths = wavelengths
                        .ok_or_else(|| syntax("`link` requires wavelengths=<int>".into()))?;
                    b.link(from, to, fibers, wavelengths, class).map_err(at)?;
                }
                other => return Err(syntax(format!("unknown directive `{other}`"))),
            }
        }
        Ok(b.build())
    }

    pub fn mode(&self) -> ConversionMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: ConversionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn routers(&self) -> &[Router] {
        &self.routers
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn router_count(&self) -> usize {
        self.routers.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn router(&self, id: RouterId) -> Result<&Router, TopologyError> {
        self.routers
            .get(id.index())
            .ok_or(TopologyError::UnknownRouter(id))
    }

    pub fn link(&self, id: LinkId) -> Result<&Link, TopologyError> {
        self.links
            .get(id.index())
            .ok_or(TopologyError::UnknownLink(id))
    }

    pub fn router_by_label(&self, label: &str) -> Option<RouterId> {
        self.routers
            .iter()
            .find(|r| r.label == label)
            .map(|r| r.id)
    }

    /// Out-links of `r` with their head routers, in link-id order.
    pub fn neighbors(&self, r: RouterId) -> Result<Vec<(LinkId, RouterId)>, TopologyError> {
        let out = self
            .out_links
            .get(r.index())
            .ok_or(TopologyError::UnknownRouter(r))?;
        Ok(out.iter().map(|&l| (l, self.links[l.index()].to)).collect())
    }

    pub(crate) fn out_links(&self, r: RouterId) -> &[LinkId] {
        &self.out_links[r.index()]
    }

    pub(crate) fn in_links(&self, r: RouterId) -> &[LinkId] {
        &self.in_links[r.index()]
    }

    pub fn contains_router(&self, r: RouterId) -> bool {
        r.index() < self.routers.len()
    }

    /// Routers first, then links.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.routers
            .iter()
            .map(|r| Element::Router(r.id))
            .chain(self.links.iter().map(|l| Element::Link(l.id)))
    }

    pub fn element_count(&self) -> usize {
        self.routers.len() + self.links.len()
    }

    pub fn class_of(&self, e: Element) -> ReliabilityClass {
        match e {
            Element::Router(r) => self.routers[r.index()].class,
            Element::Link(l) => self.links[l.index()].class,
        }
    }

    pub fn set_class(&mut self, e: Element, class: ReliabilityClass) {
        match e {
            Element::Router(r) => self.routers[r.index()].class = class,
            Element::Link(l) => self.links[l.index()].class = class,
        }
    }

    /// Largest per-fiber wavelength count over all links.
    pub fn max_wavelengths(&self) -> u16 {
        self.links.iter().map(|l| l.wavelengths).max().unwrap_or(0)
    }

    /// Mean per-fiber wavelength count over all links.
    pub fn mean_wavelengths(&self) -> f64 {
        if self.links.is_empty() {
            return 0.0;
        }
        self.links.iter().map(|l| l.wavelengths as f64).sum::<f64>() / self.links.len() as f64
    }

    /// Number of fibers summed over all links.
    pub fn total_fibers(&self) -> u32 {
        self.links.iter().map(|l| l.fibers as u32).sum()
    }

    pub fn label(&self, r: RouterId) -> &str {
        &self.routers[r.index()].label
    }
}

impl FromStr for Topology {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topology::parse(s)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode {}", self.mode.as_str())?;
        for r in &self.routers {
            writeln!(
                f,
                "router {} converters={} class={}",
                r.label,
                r.converter_count,
                r.class.as_str()
            )?;
        }
        for l in &self.links {
            writeln!(
                f,
                "link {} {} fibers={} wavelengths={} class={}",
                self.label(l.from),
                self.label(l.to),
                l.fibers,
                l.wavelengths,
                l.class.as_str()
            )?;
        }
        Ok(())
    }
}

fn split_kv(tok: &str) -> Result<(&str, &str), String> {
    tok.split_once('=')
        .ok_or_else(|| format!("expected key=value, found `{tok}`"))
}

fn parse_int<T: FromStr>(v: &str, line: usize) -> Result<T, TopologyError> {
    v.parse().map_err(|_| TopologyError::Syntax {
        line,
        message: format!("`{v}` is not a nonnegative integer"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "router A\nrouter B\nlink A B wavelengths=3\n";

    #[test]
    fn minimal_file() {
        let t = Topology::parse(MINIMAL).unwrap();
        assert_eq!(t.router_count(), 2);
        assert_eq!(t.link_count(), 1);
        assert_eq!(t.links()[0].capacity(), 3);
        assert_eq!(t.mode(), ConversionMode::FullConversion);
    }

    #[test]
    fn dangling_endpoint_reports_line() {
        let err = Topology::parse("router A\n\nlink A Z wavelengths=3").unwrap_err();
        assert_eq!(
            err,
            TopologyError::DanglingEndpoint {
                line: 3,
                label: "Z".into()
            }
        );
    }

    #[test]
    fn rejects_duplicates_and_zero_wavelengths() {
        let dup = Topology::parse("router A\nrouter A").unwrap_err();
        assert!(matches!(dup, TopologyError::AtLine { line: 2, .. }));
        let w0 = Topology::parse("router A\nrouter B\nlink A B wavelengths=0").unwrap_err();
        match w0 {
            TopologyError::AtLine { line, source } => {
                assert_eq!(line, 3);
                assert!(matches!(*source, TopologyError::NoWavelengths { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        let dl = Topology::parse("router A\nrouter B\nlink A B wavelengths=1\nlink A B wavelengths=2")
            .unwrap_err();
        assert!(matches!(dl, TopologyError::AtLine { line: 4, .. }));
    }

    #[test]
    fn syntax_errors() {
        for (text, line) in [
            ("routr A", 1),
            ("router A\nrouter B\nlink A B", 3),
            ("router A converters=x", 1),
            ("router A\nmode sideways", 2),
            ("router A colour=red", 1),
            ("router A\nrouter B\nlink A B wavelengths=-2", 3),
        ] {
            match Topology::parse(text) {
                Err(TopologyError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn self_loop_rejected() {
        let err = Topology::parse("router A\nlink A A wavelengths=1").unwrap_err();
        assert!(matches!(err, TopologyError::AtLine { .. }));
    }

    #[test]
    fn comments_and_mode() {
        let t = Topology::parse(
            "# header\nmode spn\nrouter A converters=2 class=unreliable # trailing\nrouter B\n\
             link A B fibers=2 wavelengths=4 class=unreliable",
        )
        .unwrap();
        assert_eq!(t.mode(), ConversionMode::SharePerNode);
        assert_eq!(t.routers()[0].converter_count, 2);
        assert_eq!(t.routers()[0].class, ReliabilityClass::Unreliable);
        assert_eq!(t.links()[0].capacity(), 8);
        assert_eq!(t.total_fibers(), 2);
    }

    #[test]
    fn neighbors_cases() {
        let t = Topology::parse(MINIMAL).unwrap();
        let a = t.router_by_label("A").unwrap();
        let b = t.router_by_label("B").unwrap();
        assert_eq!(t.neighbors(a).unwrap(), vec![(LinkId(0), b)]);
        assert!(t.neighbors(b).unwrap().is_empty());
        assert_eq!(
            t.neighbors(RouterId(9)),
            Err(TopologyError::UnknownRouter(RouterId(9)))
        );
    }

    #[test]
    fn display_round_trips() {
        let text = "mode spn\nrouter A converters=1\nrouter B class=unreliable\nrouter C\n\
                    link A B wavelengths=3\nlink B C fibers=2 wavelengths=2 class=unreliable\n\
                    link C A wavelengths=1\n";
        let t = Topology::parse(text).unwrap();
        let again = Topology::parse(&t.to_string()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn wavelength_is_one_based() {
        assert!(Wavelength::new(0).is_none());
        let w = Wavelength::new(3).unwrap();
        assert_eq!(w.slot(), 2);
        assert_eq!(Wavelength::from_slot(2), w);
    }
}
