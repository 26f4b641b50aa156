use std::collections::BTreeMap;

use super::{Location, Sort};
use crate::ast::{Mutability, VarDecl, VarKind};

/// Built-in symbols of the Nat term algebra.
pub const NAT_THEORY_SYMBOLS: [&str; 4] = ["zero", "suc", "pred", "leqNat"];

/// Name of the timepoint alias for `l_end` used in property files.
pub const MAIN_END: &str = "main_end";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocationSymbol {
    pub location: Location,
    /// Number of Nat arguments: enclosing loops, plus one for a loop's own
    /// iteration.
    pub arity: usize,
}

impl LocationSymbol {
    pub fn name(&self) -> String {
        self.location.symbol()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastIterationSymbol {
    pub line: u32,
    pub arity: usize,
}

impl LastIterationSymbol {
    pub fn name(&self) -> String {
        format!("n{}", self.line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSymbol {
    pub name: String,
    pub kind: VarKind,
    pub mutable: bool,
}

impl VariableSymbol {
    /// Argument sorts: a timepoint for mutable variables, a position for
    /// arrays.
    pub fn arg_sorts(&self) -> Vec<Sort> {
        let mut out = Vec::new();
        if self.mutable {
            out.push(Sort::Time);
        }
        if self.kind == VarKind::Array {
            out.push(Sort::Int);
        }
        out
    }
}

/// What a symbol name refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Location(LocationSymbol),
    LastIteration(LastIterationSymbol),
    Variable(VariableSymbol),
    /// `<array>_length`.
    Length(String),
    Reach,
    /// `main_end`, alias of `l_end`.
    EndAlias,
    NatTheory,
}

/// The trace-logic signature of one program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    locations: Vec<LocationSymbol>,
    last_iterations: Vec<LastIterationSymbol>,
    variables: Vec<VariableSymbol>,
    index: BTreeMap<String, SymbolKind>,
}

impl Signature {
    /// A signature holding only `Reach` and the Nat theory symbols.
    pub fn new() -> Signature {
        let mut sig = Signature::default();
        sig.index.insert("Reach".into(), SymbolKind::Reach);
        for s in NAT_THEORY_SYMBOLS {
            sig.index.insert(s.into(), SymbolKind::NatTheory);
        }
        sig
    }

    pub fn add_location(&mut self, location: Location, arity: usize) {
        let sym = LocationSymbol { location, arity };
        self.index
            .insert(sym.name(), SymbolKind::Location(sym.clone()));
        if location == Location::End {
            self.index.insert(MAIN_END.into(), SymbolKind::EndAlias);
        }
        self.locations.push(sym);
    }

    pub fn add_last_iteration(&mut self, line: u32, arity: usize) {
        let sym = LastIterationSymbol { line, arity };
        self.index
            .insert(sym.name(), SymbolKind::LastIteration(sym.clone()));
        self.last_iterations.push(sym);
    }

    pub fn add_variable(&mut self, decl: &VarDecl) {
        let sym = VariableSymbol {
            name: decl.name.clone(),
            kind: decl.kind,
            mutable: decl.mutability == Mutability::Mutable,
        };
        if decl.kind == VarKind::Array {
            self.index.insert(
                format!("{}_length", decl.name),
                SymbolKind::Length(decl.name.clone()),
            );
        }
        self.index
            .insert(sym.name.clone(), SymbolKind::Variable(sym.clone()));
        self.variables.push(sym);
    }

    pub fn locations(&self) -> &[LocationSymbol] {
        &self.locations
    }

    pub fn last_iterations(&self) -> &[LastIterationSymbol] {
        &self.last_iterations
    }

    pub fn variables(&self) -> &[VariableSymbol] {
        &self.variables
    }

    pub fn mutable_variables(&self) -> impl Iterator<Item = &VariableSymbol> {
        self.variables.iter().filter(|v| v.mutable)
    }

    /// Array names, in declaration order, each owning a length constant.
    pub fn arrays(&self) -> impl Iterator<Item = &VariableSymbol> {
        self.variables.iter().filter(|v| v.kind == VarKind::Array)
    }

    pub fn location(&self, loc: Location) -> Option<&LocationSymbol> {
        self.locations.iter().find(|s| s.location == loc)
    }

    pub fn last_iteration(&self, line: u32) -> Option<&LastIterationSymbol> {
        self.last_iterations.iter().find(|s| s.line == line)
    }

    pub fn variable(&self, name: &str) -> Option<&VariableSymbol> {
        match self.index.get(name) {
            Some(SymbolKind::Variable(v)) => Some(v),
            _ => None,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&SymbolKind> {
        self.index.get(name)
    }

    pub fn symbol_names(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    /// `base`, or `base_<k>` for the least `k` that does not collide with
    /// a symbol.
    pub fn fresh(&self, base: &str) -> String {
        if !self.index.contains_key(base) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|n| !self.index.contains_key(n))
            .unwrap()
    }
}
