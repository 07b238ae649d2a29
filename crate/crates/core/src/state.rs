//! Mutable occupancy of a network: channels, converters, transient failure
//! flags and the set of established lightpaths.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{ConversionMode, Element, LinkId, RouterId, Topology, Wavelength};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LightpathId(pub u64);

/// One traversed link and the wavelength used on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop {
    pub link: LinkId,
    pub wavelength: Wavelength,
}

/// A wavelength change inside a router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversion {
    pub router: RouterId,
    pub from: Wavelength,
    pub to: Wavelength,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lightpath {
    pub id: LightpathId,
    pub source: RouterId,
    pub dest: RouterId,
    pub hops: Vec<Hop>,
    pub conversions: Vec<Conversion>,
    pub departure: f64,
}

impl Lightpath {
    /// Source followed by the head of every hop.
    pub fn routers<'a>(&'a self, topology: &'a Topology) -> impl Iterator<Item = RouterId> + 'a {
        std::iter::once(self.source).chain(self.hops.iter().map(|h| topology.links()[h.link.index()].to))
    }

    pub fn uses(&self, topology: &Topology, e: Element) -> bool {
        match e {
            Element::Link(l) => self.hops.iter().any(|h| h.link == l),
            Element::Router(r) => self.routers(topology).any(|x| x == r),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("channel {wavelength} on {link} is not free")]
    ChannelBusy { link: LinkId, wavelength: Wavelength },
    #[error("wavelength {wavelength} does not exist on {link}")]
    NoSuchWavelength { link: LinkId, wavelength: Wavelength },
    #[error("no free converter at {0}")]
    NoConverter(RouterId),
    #[error("{0} is failed")]
    Failed(Element),
    #[error("hops do not form a walk from {from} to {dest}")]
    Discontinuous { from: RouterId, dest: RouterId },
    #[error("lightpath {0:?} already established")]
    Duplicate(LightpathId),
    #[error("link {link} carries {counted} channels but lightpaths account for {expected}")]
    Conservation {
        link: LinkId,
        counted: u32,
        expected: u32,
    },
    #[error("router {router} uses {used} converters but lightpaths account for {expected}")]
    ConverterConservation {
        router: RouterId,
        used: u32,
        expected: u32,
    },
}

/// Occupancy snapshot of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    /// Per link, per wavelength slot: fibers carrying that wavelength.
    channel_use: Vec<Vec<u16>>,
    fibers: Vec<u16>,
    converters_in_use: Vec<u32>,
    /// `None` means unbounded (full conversion).
    converter_capacity: Vec<Option<u32>>,
    failed_links: Vec<bool>,
    failed_routers: Vec<bool>,
    lightpaths: BTreeMap<LightpathId, Lightpath>,
}

impl NetworkState {
    pub fn new(topology: &Topology) -> Self {
        let bounded = topology.mode() == ConversionMode::SharePerNode;
        NetworkState {
            channel_use: topology
                .links()
                .iter()
                .map(|l| vec![0; l.wavelengths as usize])
                .collect(),
            fibers: topology.links().iter().map(|l| l.fibers).collect(),
            converters_in_use: vec![0; topology.router_count()],
            converter_capacity: topology
                .routers()
                .iter()
                .map(|r| bounded.then_some(r.converter_count))
                .collect(),
            failed_links: vec![false; topology.link_count()],
            failed_routers: vec![false; topology.router_count()],
            lightpaths: BTreeMap::new(),
        }
    }

    pub fn wavelengths(&self, link: LinkId) -> u16 {
        self.channel_use[link.index()].len() as u16
    }

    pub fn is_channel_free(&self, link: LinkId, w: Wavelength) -> bool {
        self.channel_use[link.index()]
            .get(w.slot())
            .is_some_and(|&used| used < self.fibers[link.index()])
    }

    /// Free wavelengths on `link` in increasing index order.
    pub fn free_wavelengths(&self, link: LinkId) -> impl Iterator<Item = Wavelength> + '_ {
        let fibers = self.fibers[link.index()];
        self.channel_use[link.index()]
            .iter()
            .enumerate()
            .filter(move |(_, &used)| used < fibers)
            .map(|(slot, _)| Wavelength::from_slot(slot))
    }

    pub fn occupied_channels(&self, link: LinkId) -> u32 {
        self.channel_use[link.index()].iter().map(|&u| u as u32).sum()
    }

    pub fn capacity(&self, link: LinkId) -> u32 {
        self.fibers[link.index()] as u32 * self.channel_use[link.index()].len() as u32
    }

    pub fn free_channels(&self, link: LinkId) -> u32 {
        self.capacity(link) - self.occupied_channels(link)
    }

    pub fn converters_in_use(&self, r: RouterId) -> u32 {
        self.converters_in_use[r.index()]
    }

    pub fn converter_capacity(&self, r: RouterId) -> Option<u32> {
        self.converter_capacity[r.index()]
    }

    pub fn has_free_converter(&self, r: RouterId) -> bool {
        match self.converter_capacity[r.index()] {
            None => true,
            Some(cap) => self.converters_in_use[r.index()] < cap,
        }
    }

    pub fn is_failed(&self, e: Element) -> bool {
        match e {
            Element::Router(r) => self.failed_routers[r.index()],
            Element::Link(l) => self.failed_links[l.index()],
        }
    }

    pub fn set_failed(&mut self, e: Element, failed: bool) {
        match e {
            Element::Router(r) => self.failed_routers[r.index()] = failed,
            Element::Link(l) => self.failed_links[l.index()] = failed,
        }
    }

    /// A link is usable when it and its head router are up and it has a
    /// free channel.
    pub fn link_usable(&self, topology: &Topology, link: LinkId) -> bool {
        let l = &topology.links()[link.index()];
        !self.failed_links[link.index()]
            && !self.failed_routers[l.from.index()]
            && !self.failed_routers[l.to.index()]
            && self.free_channels(link) > 0
    }

    pub fn lightpaths(&self) -> impl Iterator<Item = &Lightpath> {
        self.lightpaths.values()
    }

    pub fn lightpath(&self, id: LightpathId) -> Option<&Lightpath> {
        self.lightpaths.get(&id)
    }

    pub fn active_count(&self) -> usize {
        self.lightpaths.len()
    }

    /// Lightpaths that traverse `e`, in id order.
    pub fn lightpaths_using(&self, topology: &Topology, e: Element) -> Vec<LightpathId> {
        self.lightpaths
            .values()
            .filter(|lp| lp.uses(topology, e))
            .map(|lp| lp.id)
            .collect()
    }

    /// Checks that `lp` fits into the current state without changing it.
    pub fn validate(&self, topology: &Topology, lp: &Lightpath) -> Result<(), StateError> {
        if self.lightpaths.contains_key(&lp.id) {
            return Err(StateError::Duplicate(lp.id));
        }
        let mut at = lp.source;
        let mut visited = vec![lp.source];
        for h in &lp.hops {
            let link = &topology.links()[h.link.index()];
            if link.from != at || visited.contains(&link.to) {
                return Err(StateError::Discontinuous {
                    from: lp.source,
                    dest: lp.dest,
                });
            }
            if h.wavelength.get() > link.wavelengths {
                return Err(StateError::NoSuchWavelength {
                    link: h.link,
                    wavelength: h.wavelength,
                });
            }
            if !self.is_channel_free(h.link, h.wavelength) {
                return Err(StateError::ChannelBusy {
                    link: h.link,
                    wavelength: h.wavelength,
                });
            }
            if self.failed_links[h.link.index()] {
                return Err(StateError::Failed(Element::Link(h.link)));
            }
            at = link.to;
            visited.push(at);
        }
        if at != lp.dest || lp.hops.is_empty() {
            return Err(StateError::Discontinuous {
                from: lp.source,
                dest: lp.dest,
            });
        }
        for &r in &visited {
            if self.failed_routers[r.index()] {
                return Err(StateError::Failed(Element::Router(r)));
            }
        }
        for c in &lp.conversions {
            if !self.has_free_converter(c.router) {
                return Err(StateError::NoConverter(c.router));
            }
        }
        Ok(())
    }

    /// Occupies the lightpath's channels and converters.
    pub fn establish(&mut self, topology: &Topology, lp: Lightpath) -> Result<(), StateError> {
        self.validate(topology, &lp)?;
        for h in &lp.hops {
            self.channel_use[h.link.index()][h.wavelength.slot()] += 1;
        }
        for c in &lp.conversions {
            if self.converter_capacity[c.router.index()].is_some() {
                self.converters_in_use[c.router.index()] += 1;
            }
        }
        self.lightpaths.insert(lp.id, lp);
        Ok(())
    }

    /// Releases the lightpath's resources and returns it.
    pub fn release(&mut self, id: LightpathId) -> Option<Lightpath> {
        let lp = self.lightpaths.remove(&id)?;
        for h in &lp.hops {
            self.channel_use[h.link.index()][h.wavelength.slot()] -= 1;
        }
        for c in &lp.conversions {
            if self.converter_capacity[c.router.index()].is_some() {
                self.converters_in_use[c.router.index()] -= 1;
            }
        }
        Some(lp)
    }

    /// Verifies channel and converter conservation against the lightpath set.
    pub fn check_conservation(&self) -> Result<(), StateError> {
        let mut expected: Vec<u32> = vec![0; self.channel_use.len()];
        let mut conv: Vec<u32> = vec![0; self.converters_in_use.len()];
        for lp in self.lightpaths.values() {
            for h in &lp.hops {
                expected[h.link.index()] += 1;
            }
            for c in &lp.conversions {
                if self.converter_capacity[c.router.index()].is_some() {
                    conv[c.router.index()] += 1;
                }
            }
        }
        for (i, &e) in expected.iter().enumerate() {
            let link = LinkId(i as u32);
            let counted = self.occupied_channels(link);
            if counted != e {
                return Err(StateError::Conservation {
                    link,
                    counted,
                    expected: e,
                });
            }
        }
        for (i, &e) in conv.iter().enumerate() {
            let used = self.converters_in_use[i];
            let over = self.converter_capacity[i].is_some_and(|cap| used > cap);
            if used != e || over {
                return Err(StateError::ConverterConservation {
                    router: RouterId(i as u32),
                    used,
                    expected: e,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3(mode: &str) -> Topology {
        Topology::parse(&format!(
            "mode {mode}\nrouter A converters=1\nrouter B converters=1\nrouter C converters=1\n\
             link A B wavelengths=2\nlink B C wavelengths=2\nlink C A wavelengths=2"
        ))
        .unwrap()
    }

    fn w(i: u16) -> Wavelength {
        Wavelength::new(i).unwrap()
    }

    fn lp(id: u64, hops: &[(u32, u16)], conv: &[(u32, u16, u16)]) -> Lightpath {
        Lightpath {
            id: LightpathId(id),
            source: RouterId(0),
            dest: RouterId(hops.len() as u32),
            hops: hops
                .iter()
                .map(|&(l, wl)| Hop {
                    link: LinkId(l),
                    wavelength: w(wl),
                })
                .collect(),
            conversions: conv
                .iter()
                .map(|&(r, a, b)| Conversion {
                    router: RouterId(r),
                    from: w(a),
                    to: w(b),
                })
                .collect(),
            departure: 1.0,
        }
    }

    #[test]
    fn establish_and_release_conserve_channels() {
        let t = line3("spn");
        let mut s = NetworkState::new(&t);
        s.establish(&t, lp(1, &[(0, 1), (1, 2)], &[(1, 1, 2)])).unwrap();
        assert_eq!(s.occupied_channels(LinkId(0)), 1);
        assert_eq!(s.occupied_channels(LinkId(1)), 1);
        assert_eq!(s.converters_in_use(RouterId(1)), 1);
        assert!(!s.has_free_converter(RouterId(1)));
        s.check_conservation().unwrap();
        assert_eq!(
            s.free_wavelengths(LinkId(0)).collect::<Vec<_>>(),
            vec![w(2)]
        );

        let err = s.establish(&t, lp(2, &[(0, 2), (1, 1)], &[(1, 2, 1)])).unwrap_err();
        assert_eq!(err, StateError::NoConverter(RouterId(1)));
        let err = s.establish(&t, lp(3, &[(0, 1)], &[])).unwrap_err();
        assert!(matches!(err, StateError::ChannelBusy { .. }));

        s.release(LightpathId(1)).unwrap();
        assert_eq!(s.occupied_channels(LinkId(0)), 0);
        assert_eq!(s.converters_in_use(RouterId(1)), 0);
        s.check_conservation().unwrap();
    }

    #[test]
    fn full_conversion_does_not_consume_converters() {
        let t = line3("wi");
        let mut s = NetworkState::new(&t);
        s.establish(&t, lp(1, &[(0, 1), (1, 2)], &[(1, 1, 2)])).unwrap();
        s.establish(&t, lp(2, &[(0, 2), (1, 1)], &[(1, 2, 1)])).unwrap();
        assert!(s.has_free_converter(RouterId(1)));
        assert_eq!(s.free_channels(LinkId(0)), 0);
        s.check_conservation().unwrap();
    }

    #[test]
    fn rejects_broken_walks_and_failed_elements() {
        let t = line3("wi");
        let mut s = NetworkState::new(&t);
        let err = s.validate(&t, &lp(1, &[(1, 1)], &[])).unwrap_err();
        assert!(matches!(err, StateError::Discontinuous { .. }));
        let err = s.validate(&t, &lp(1, &[(0, 3)], &[])).unwrap_err();
        assert!(matches!(err, StateError::NoSuchWavelength { .. }));
        s.set_failed(Element::Router(RouterId(1)), true);
        let err = s.validate(&t, &lp(1, &[(0, 1)], &[])).unwrap_err();
        assert_eq!(err, StateError::Failed(Element::Router(RouterId(1))));
        assert!(!s.link_usable(&t, LinkId(0)));
    }

    #[test]
    fn lightpaths_using_includes_endpoints() {
        let t = line3("wi");
        let mut s = NetworkState::new(&t);
        s.establish(&t, lp(4, &[(0, 1), (1, 1)], &[])).unwrap();
        s.establish(&t, lp(2, &[(0, 2)], &[])).unwrap();
        assert_eq!(
            s.lightpaths_using(&t, Element::Router(RouterId(0))),
            vec![LightpathId(2), LightpathId(4)]
        );
        assert_eq!(
            s.lightpaths_using(&t, Element::Link(LinkId(1))),
            vec![LightpathId(4)]
        );
        assert!(s.lightpaths_using(&t, Element::Link(LinkId(2))).is_empty());
    }
}
