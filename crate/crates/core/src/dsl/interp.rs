//! Budgeted tree-walking interpreter.
//!
//! A [`SyntaxTree`] is lowered once into a slot-resolved form and can then be
//! run many times. Every executed statement and every evaluated expression
//! node costs one step; each loop iteration costs one further step and counts
//! against the loop budget.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::error::ExecError;
use super::tree::{NodeKind, SyntaxTree};
use super::value::{Matrix, Value, MAX_ELEMENTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecLimits {
    pub max_steps: u64,
    pub max_loop_total: u64,
}

impl Default for ExecLimits {
    fn default() -> Self {
        Self {
            max_steps: 2_000_000,
            max_loop_total: 1_000_000,
        }
    }
}

impl ExecLimits {
    pub fn new(max_steps: u64, max_loop_total: u64) -> Option<Self> {
        (max_steps > 0 && max_loop_total > 0).then_some(Self {
            max_steps,
            max_loop_total,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    fn parse(op: &str) -> Option<Self> {
        Some(match op {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "^" => BinOp::Pow,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Pow => "^",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        let truth = |c: bool| if c { 1.0 } else { 0.0 };
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            // Floored modulo; `x % 0` is NaN and rejected by the finiteness check.
            BinOp::Rem => a - b * (a / b).floor(),
            BinOp::Pow => a.powf(b),
            BinOp::Lt => truth(a < b),
            BinOp::Le => truth(a <= b),
            BinOp::Gt => truth(a > b),
            BinOp::Ge => truth(a >= b),
            BinOp::Eq => truth(a == b),
            BinOp::Ne => truth(a != b),
            BinOp::And => truth(a != 0.0 && b != 0.0),
            BinOp::Or => truth(a != 0.0 || b != 0.0),
        }
    }
}

/// Builtin functions of the language.
pub const BUILTINS: &[&str] = &[
    "abs", "sqrt", "log", "exp", "tanh", "min", "max", "pow", "floor", "ceil", "sum", "mean",
    "maxv", "minv", "len", "rows", "cols", "zeros", "copy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    Abs,
    Sqrt,
    Log,
    Exp,
    Tanh,
    Floor,
    Ceil,
    Min,
    Max,
    Pow,
    Sum,
    Mean,
    MaxV,
    MinV,
    Len,
    Rows,
    Cols,
    Zeros,
    Copy,
}

impl Builtin {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Builtin::Abs,
            "sqrt" => Builtin::Sqrt,
            "log" => Builtin::Log,
            "exp" => Builtin::Exp,
            "tanh" => Builtin::Tanh,
            "floor" => Builtin::Floor,
            "ceil" => Builtin::Ceil,
            "min" => Builtin::Min,
            "max" => Builtin::Max,
            "pow" => Builtin::Pow,
            "sum" => Builtin::Sum,
            "mean" => Builtin::Mean,
            "maxv" => Builtin::MaxV,
            "minv" => Builtin::MinV,
            "len" => Builtin::Len,
            "rows" => Builtin::Rows,
            "cols" => Builtin::Cols,
            "zeros" => Builtin::Zeros,
            "copy" => Builtin::Copy,
            _ => return None,
        })
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            Builtin::Min | Builtin::Max | Builtin::Pow => n == 2,
            Builtin::Zeros => n == 1 || n == 2,
            _ => n == 1,
        }
    }

    fn arity_text(self) -> &'static str {
        match self {
            Builtin::Min | Builtin::Max | Builtin::Pow => "2",
            Builtin::Zeros => "1 or 2",
            _ => "1",
        }
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Num(f64),
    Var(usize),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
    Index(usize, Vec<Expr>),
}

#[derive(Debug, Clone)]
enum Stmt {
    Let(usize, Expr),
    Assign(usize, Expr),
    IndexAssign(usize, Vec<Expr>, Expr),
    For(usize, Expr, Expr, Vec<Stmt>),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    Return(Expr),
}

/// A program lowered for repeated execution.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    arity: usize,
    slot_names: Vec<String>,
    body: Vec<Stmt>,
}

/// Result of one successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub value: Value,
    pub steps: u64,
}

/// Lowers and runs `tree` once.
pub fn execute(tree: &SyntaxTree, args: Vec<Value>, limits: &ExecLimits) -> Result<(Value, u64), ExecError> {
    let program = CompiledProgram::compile(tree)?;
    let run = program.run(args, limits)?;
    Ok((run.value, run.steps))
}

/// True when the program never inspects vector length or individual
/// elements: no loops, no indexing, no reductions or shape queries. Such a
/// program maps equal input elements to equal output elements.
pub fn is_elementwise(tree: &SyntaxTree) -> bool {
    let mut ok = true;
    tree.walk(&mut |node| match node.kind {
        NodeKind::For | NodeKind::Index | NodeKind::IndexAssign => ok = false,
        NodeKind::Call => {
            if !matches!(
                Builtin::lookup(node.lexeme()),
                Some(
                    Builtin::Abs
                        | Builtin::Sqrt
                        | Builtin::Log
                        | Builtin::Exp
                        | Builtin::Tanh
                        | Builtin::Floor
                        | Builtin::Ceil
                        | Builtin::Min
                        | Builtin::Max
                        | Builtin::Pow
                        | Builtin::Copy
                )
            ) {
                ok = false;
            }
        }
        _ => {}
    });
    ok
}

struct Lowering {
    slots: HashMap<String, usize>,
    names: Vec<String>,
}

impl Lowering {
    fn slot(&mut self, name: &str) -> usize {
        if let Some(&s) = self.slots.get(name) {
            return s;
        }
        let s = self.names.len();
        self.slots.insert(name.to_string(), s);
        self.names.push(name.to_string());
        s
    }

    fn stmts(&mut self, nodes: &[SyntaxTree]) -> Result<Vec<Stmt>, ExecError> {
        nodes.iter().map(|n| self.stmt(n)).collect()
    }

    fn stmt(&mut self, node: &SyntaxTree) -> Result<Stmt, ExecError> {
        let kids = &node.children;
        let malformed = || ExecError::Malformed(format!("unexpected shape of {} node", node.kind));
        Ok(match node.kind {
            NodeKind::Let | NodeKind::Assign => {
                let value = self.expr(kids.first().ok_or_else(malformed)?)?;
                let slot = self.slot(node.lexeme());
                if node.kind == NodeKind::Let {
                    Stmt::Let(slot, value)
                } else {
                    Stmt::Assign(slot, value)
                }
            }
            NodeKind::IndexAssign => {
                if kids.len() < 2 {
                    return Err(malformed());
                }
                let slot = self.slot(node.lexeme());
                let indices = kids[..kids.len() - 1]
                    .iter()
                    .map(|k| self.expr(k))
                    .collect::<Result<_, _>>()?;
                Stmt::IndexAssign(slot, indices, self.expr(&kids[kids.len() - 1])?)
            }
            NodeKind::For => {
                if kids.len() != 3 || kids[2].kind != NodeKind::Block {
                    return Err(malformed());
                }
                let slot = self.slot(node.lexeme());
                Stmt::For(
                    slot,
                    self.expr(&kids[0])?,
                    self.expr(&kids[1])?,
                    self.stmts(&kids[2].children)?,
                )
            }
            NodeKind::If => {
                if !(kids.len() == 2 || kids.len() == 3) {
                    return Err(malformed());
                }
                let otherwise = match kids.get(2) {
                    Some(b) => Some(self.stmts(&b.children)?),
                    None => None,
                };
                Stmt::If(self.expr(&kids[0])?, self.stmts(&kids[1].children)?, otherwise)
            }
            NodeKind::Return => Stmt::Return(self.expr(kids.first().ok_or_else(malformed)?)?),
            _ => return Err(malformed()),
        })
    }

    fn expr(&mut self, node: &SyntaxTree) -> Result<Expr, ExecError> {
        let kids = &node.children;
        Ok(match node.kind {
            NodeKind::NumLit => {
                let v: f64 = node
                    .lexeme()
                    .parse()
                    .map_err(|_| ExecError::Malformed(format!("bad literal `{}`", node.lexeme())))?;
                Expr::Num(v)
            }
            NodeKind::Ident => Expr::Var(self.slot(node.lexeme())),
            NodeKind::Unary => {
                let op = match node.lexeme() {
                    "-" => UnOp::Neg,
                    "!" => UnOp::Not,
                    other => return Err(ExecError::Malformed(format!("unary operator `{other}`"))),
                };
                let operand = kids
                    .first()
                    .ok_or_else(|| ExecError::Malformed("unary without operand".into()))?;
                Expr::Unary(op, Box::new(self.expr(operand)?))
            }
            NodeKind::Binary => {
                let op = BinOp::parse(node.lexeme()).ok_or_else(|| {
                    ExecError::Malformed(format!("binary operator `{}`", node.lexeme()))
                })?;
                if kids.len() != 2 {
                    return Err(ExecError::Malformed("binary node needs two operands".into()));
                }
                Expr::Binary(op, Box::new(self.expr(&kids[0])?), Box::new(self.expr(&kids[1])?))
            }
            NodeKind::Call => {
                let name = node.lexeme();
                let builtin =
                    Builtin::lookup(name).ok_or_else(|| ExecError::UnknownFunction(name.to_string()))?;
                if !builtin.arity_ok(kids.len()) {
                    return Err(ExecError::Arity {
                        name: name.to_string(),
                        expected: builtin.arity_text().to_string(),
                        got: kids.len(),
                    });
                }
                Expr::Call(builtin, kids.iter().map(|k| self.expr(k)).collect::<Result<_, _>>()?)
            }
            NodeKind::Index => {
                let base = kids
                    .first()
                    .filter(|b| b.kind == NodeKind::Ident)
                    .ok_or_else(|| ExecError::Malformed("index base must be an identifier".into()))?;
                if kids.len() < 2 {
                    return Err(ExecError::Malformed("index without subscripts".into()));
                }
                let slot = self.slot(base.lexeme());
                Expr::Index(slot, kids[1..].iter().map(|k| self.expr(k)).collect::<Result<_, _>>()?)
            }
            _ => return Err(ExecError::Malformed(format!("{} is not an expression", node.kind))),
        })
    }
}

impl CompiledProgram {
    pub fn compile(tree: &SyntaxTree) -> Result<Self, ExecError> {
        if tree.kind != NodeKind::Program {
            return Err(ExecError::Malformed("root must be a Program".into()));
        }
        let mut lowering = Lowering {
            slots: HashMap::new(),
            names: Vec::new(),
        };
        let params = tree.params();
        for p in &params {
            lowering.slot(p);
        }
        let body: Vec<SyntaxTree> = tree.body().cloned().collect();
        let body = lowering.stmts(&body)?;
        Ok(Self {
            arity: params.len(),
            slot_names: lowering.names,
            body,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn run(&self, args: Vec<Value>, limits: &ExecLimits) -> Result<Execution, ExecError> {
        if args.len() != self.arity {
            return Err(ExecError::ArgumentCount {
                expected: self.arity,
                got: args.len(),
            });
        }
        let mut slots: Vec<Option<Value>> = vec![None; self.slot_names.len()];
        for (slot, arg) in slots.iter_mut().zip(args) {
            *slot = Some(arg);
        }
        let mut machine = Machine {
            names: &self.slot_names,
            slots,
            steps: 0,
            loops: 0,
            limits,
        };
        match machine.block(&self.body)? {
            Some(value) => Ok(Execution {
                value,
                steps: machine.steps,
            }),
            None => Err(ExecError::MissingReturn),
        }
    }
}

struct Machine<'a> {
    names: &'a [String],
    slots: Vec<Option<Value>>,
    steps: u64,
    loops: u64,
    limits: &'a ExecLimits,
}

fn finite(value: Value, what: &str) -> Result<Value, ExecError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ExecError::Numeric(format!("non-finite result from `{what}`")))
    }
}

fn scalar_of(value: &Value, what: &str) -> Result<f64, ExecError> {
    value
        .as_scalar()
        .ok_or_else(|| ExecError::Type(format!("{what} must be a scalar, got {}", value.describe())))
}

fn index_of(x: f64, len: usize) -> Result<usize, ExecError> {
    if x.fract() != 0.0 {
        return Err(ExecError::Type(format!("index {x} is not an integer")));
    }
    if x < 0.0 || x >= len as f64 {
        return Err(ExecError::Shape(format!("index {x} out of bounds for length {len}")));
    }
    Ok(x as usize)
}

fn size_of(x: f64) -> Result<usize, ExecError> {
    if x.fract() != 0.0 || x < 0.0 {
        return Err(ExecError::Type(format!("size {x} must be a non-negative integer")));
    }
    if x > MAX_ELEMENTS as f64 {
        return Err(ExecError::Shape(format!("size {x} exceeds the element cap")));
    }
    Ok(x as usize)
}

impl Machine<'_> {
    #[inline]
    fn tick(&mut self) -> Result<(), ExecError> {
        if self.steps >= self.limits.max_steps {
            return Err(ExecError::StepBudgetExceeded {
                limit: self.limits.max_steps,
            });
        }
        self.steps += 1;
        Ok(())
    }

    fn read(&self, slot: usize) -> Result<&Value, ExecError> {
        self.slots[slot]
            .as_ref()
            .ok_or_else(|| ExecError::UndefinedVariable(self.names[slot].clone()))
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<Option<Value>, ExecError> {
        for stmt in stmts {
            if let Some(v) = self.stmt(stmt)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<Option<Value>, ExecError> {
        self.tick()?;
        match stmt {
            Stmt::Let(slot, e) => {
                let v = self.eval(e)?;
                self.slots[*slot] = Some(v);
            }
            Stmt::Assign(slot, e) => {
                let v = self.eval(e)?;
                self.read(*slot)?;
                self.slots[*slot] = Some(v);
            }
            Stmt::IndexAssign(slot, indices, e) => {
                let idx = indices
                    .iter()
                    .map(|i| self.eval(i).and_then(|v| scalar_of(&v, "index")))
                    .collect::<Result<Vec<f64>, _>>()?;
                let value = self.eval(e)?;
                self.read(*slot)?;
                let target = self.slots[*slot].as_mut().expect("checked above");
                assign_index(target, &idx, value)?;
            }
            Stmt::For(slot, start, end, body) => {
                let start = scalar_of(&self.eval(start)?, "range start")?;
                let end = scalar_of(&self.eval(end)?, "range end")?;
                let mut i = start;
                while i < end {
                    self.loops += 1;
                    if self.loops > self.limits.max_loop_total {
                        return Err(ExecError::LoopBudgetExceeded {
                            limit: self.limits.max_loop_total,
                        });
                    }
                    self.tick()?;
                    self.slots[*slot] = Some(Value::Scalar(i));
                    if let Some(v) = self.block(body)? {
                        return Ok(Some(v));
                    }
                    i += 1.0;
                }
            }
            Stmt::If(cond, then, otherwise) => {
                let c = scalar_of(&self.eval(cond)?, "condition")?;
                let branch = if c != 0.0 { Some(then) } else { otherwise.as_ref() };
                if let Some(b) = branch {
                    return self.block(b);
                }
            }
            Stmt::Return(e) => return Ok(Some(self.eval(e)?)),
        }
        Ok(None)
    }

    fn eval(&mut self, expr: &Expr) -> Result<Value, ExecError> {
        self.tick()?;
        match expr {
            Expr::Num(x) => Ok(Value::Scalar(*x)),
            Expr::Var(slot) => self.read(*slot).cloned(),
            Expr::Unary(op, e) => {
                let v = self.eval(e)?;
                Ok(match op {
                    UnOp::Neg => v.map(|x| -x),
                    UnOp::Not => v.map(|x| if x == 0.0 { 1.0 } else { 0.0 }),
                })
            }
            Expr::Binary(op, a, b) => {
                let lhs = self.eval(a)?;
                let rhs = self.eval(b)?;
                let op = *op;
                finite(lhs.zip_with(rhs, op.symbol(), |x, y| op.apply(x, y))?, op.symbol())
            }
            Expr::Call(f, args) => {
                let args = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                call(*f, args)
            }
            Expr::Index(slot, indices) => {
                // the base identifier counts as an evaluated node
                self.tick()?;
                let idx = indices
                    .iter()
                    .map(|i| self.eval(i).and_then(|v| scalar_of(&v, "index")))
                    .collect::<Result<Vec<f64>, _>>()?;
                read_index(self.read(*slot)?, &idx)
            }
        }
    }
}

fn read_index(base: &Value, idx: &[f64]) -> Result<Value, ExecError> {
    match (base, idx) {
        (Value::Vector(v), [i]) => Ok(Value::Scalar(v[index_of(*i, v.len())?])),
        (Value::Matrix(m), [i]) => Ok(Value::Vector(m.row(index_of(*i, m.rows())?).to_vec())),
        (Value::Matrix(m), [i, j]) => Ok(Value::Scalar(
            m.get(index_of(*i, m.rows())?, index_of(*j, m.cols())?),
        )),
        (Value::Scalar(_), _) => Err(ExecError::Type("cannot index a scalar".into())),
        (other, _) => Err(ExecError::Shape(format!(
            "{} subscripts on {}",
            idx.len(),
            other.describe()
        ))),
    }
}

fn assign_index(target: &mut Value, idx: &[f64], value: Value) -> Result<(), ExecError> {
    match (target, idx) {
        (Value::Vector(v), [i]) => {
            let i = index_of(*i, v.len())?;
            v[i] = scalar_of(&value, "assigned element")?;
        }
        (Value::Matrix(m), [i, j]) => {
            let (i, j) = (index_of(*i, m.rows())?, index_of(*j, m.cols())?);
            m.set(i, j, scalar_of(&value, "assigned element")?);
        }
        (Value::Matrix(m), [i]) => {
            let i = index_of(*i, m.rows())?;
            let cols = m.cols();
            match value {
                Value::Vector(row) if row.len() == cols => {
                    m.data_mut()[i * cols..(i + 1) * cols].copy_from_slice(&row);
                }
                Value::Scalar(x) => m.data_mut()[i * cols..(i + 1) * cols].fill(x),
                other => {
                    return Err(ExecError::Shape(format!(
                        "cannot assign {} to a matrix row of length {cols}",
                        other.describe()
                    )))
                }
            }
        }
        (Value::Scalar(_), _) => return Err(ExecError::Type("cannot index a scalar".into())),
        (other, _) => {
            return Err(ExecError::Shape(format!(
                "{} subscripts on {}",
                idx.len(),
                other.describe()
            )))
        }
    }
    Ok(())
}

fn reduce(v: &Value, name: &str, f: impl Fn(&[f64]) -> f64) -> Result<Value, ExecError> {
    let xs = v.elements();
    if xs.is_empty() {
        return Err(ExecError::Numeric(format!("`{name}` of an empty value")));
    }
    Ok(Value::Scalar(f(xs)))
}

fn call(f: Builtin, mut args: Vec<Value>) -> Result<Value, ExecError> {
    let first = args.remove(0);
    let value = match f {
        Builtin::Abs => first.map(f64::abs),
        Builtin::Sqrt => finite(first.map(f64::sqrt), "sqrt")?,
        Builtin::Log => finite(first.map(f64::ln), "log")?,
        Builtin::Exp => finite(first.map(f64::exp), "exp")?,
        Builtin::Tanh => first.map(f64::tanh),
        Builtin::Floor => first.map(f64::floor),
        Builtin::Ceil => first.map(f64::ceil),
        Builtin::Min => first.zip_with(args.remove(0), "min", f64::min)?,
        Builtin::Max => first.zip_with(args.remove(0), "max", f64::max)?,
        Builtin::Pow => finite(first.zip_with(args.remove(0), "pow", f64::powf)?, "pow")?,
        Builtin::Sum => Value::Scalar(first.elements().iter().sum()),
        Builtin::Mean => reduce(&first, "mean", |xs| xs.iter().sum::<f64>() / xs.len() as f64)?,
        Builtin::MaxV => reduce(&first, "maxv", |xs| xs.iter().copied().fold(f64::MIN, f64::max))?,
        Builtin::MinV => reduce(&first, "minv", |xs| xs.iter().copied().fold(f64::MAX, f64::min))?,
        Builtin::Len => match &first {
            Value::Vector(v) => Value::Scalar(v.len() as f64),
            Value::Matrix(m) => Value::Scalar(m.rows() as f64),
            Value::Scalar(_) => return Err(ExecError::Type("len of a scalar".into())),
        },
        Builtin::Rows | Builtin::Cols => match &first {
            Value::Matrix(m) => Value::Scalar(if f == Builtin::Rows { m.rows() } else { m.cols() } as f64),
            other => return Err(ExecError::Type(format!("rows/cols of {}", other.describe()))),
        },
        Builtin::Zeros => {
            let n = size_of(scalar_of(&first, "zeros size")?)?;
            match args.pop() {
                None => Value::Vector(vec![0.0; n]),
                Some(c) => {
                    let c = size_of(scalar_of(&c, "zeros size")?)?;
                    if n.saturating_mul(c) > MAX_ELEMENTS {
                        return Err(ExecError::Shape("zeros exceeds the element cap".into()));
                    }
                    Value::Matrix(Matrix::zeros(n, c))
                }
            }
        }
        Builtin::Copy => first,
    };
    Ok(value)
}
