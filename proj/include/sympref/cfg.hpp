#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sympref/minilang/interp.hpp"
#include "sympref/minilang/typecheck.hpp"

namespace sympref {

using minilang::BranchDir;

enum class EdgeLabel { Fallthrough, BranchTrue, BranchFalse };

inline const char* edge_label_name(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::Fallthrough: return "Fallthrough";
    case EdgeLabel::BranchTrue: return "BranchTrue";
    case EdgeLabel::BranchFalse: return "BranchFalse";
  }
  return "?";
}

struct BasicBlock {
  enum class Term { Jump, Branch, Return };

  std::vector<const minilang::Stmt*> stmts;  // straight-line assignments
  Term term = Term::Jump;
  minilang::ExprPtr cond;          // Term::Branch
  minilang::ExprPtr return_value;  // Term::Return
  bool is_loop_header = false;
};

struct Edge {
  int from = 0;
  int to = 0;
  EdgeLabel label = EdgeLabel::Fallthrough;
};

// One entry-to-exit walk: the direction of every branch decision in execution
// order, plus how often each loop header's body was entered.
struct PathDescriptor {
  std::vector<BranchDir> edge_choices;
  std::map<int, int> loop_iterations;
  std::vector<int> blocks;  // visited block ids, entry to exit

  friend bool operator==(const PathDescriptor& a, const PathDescriptor& b) {
    return a.edge_choices == b.edge_choices;
  }
  friend bool operator<(const PathDescriptor& a, const PathDescriptor& b) {
    return a.edge_choices < b.edge_choices;
  }
};

struct PathExplosionError : std::runtime_error {
  explicit PathExplosionError(std::size_t cap)
      : std::runtime_error("path enumeration exceeded cap of " + std::to_string(cap)) {}
};

inline constexpr std::size_t kDefaultPathCap = 4096;
inline constexpr int kDefaultLoopBound = 3;

namespace detail {
class CfgBuilder;
}

// Control flow graph of a typechecked program. Keeps its own copy of the
// program alive; statement pointers refer into that copy. Statements after a
// definite return are unreachable and do not appear in any block.
class Cfg {
 public:
  const minilang::TypedProgram& program() const { return *program_; }
  const std::vector<BasicBlock>& blocks() const { return blocks_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int entry() const { return entry_; }
  const std::set<int>& exits() const { return exits_; }

  int successor(int block, EdgeLabel label) const {
    for (const auto& e : edges_)
      if (e.from == block && e.label == label) return e.to;
    return -1;
  }

  std::string dump() const {
    std::string out;
    for (const auto& e : edges_)
      out += std::to_string(e.from) + " -> " + std::to_string(e.to) + " [" +
             edge_label_name(e.label) + "]\n";
    return out;
  }

 private:
  friend class detail::CfgBuilder;

  std::shared_ptr<const minilang::TypedProgram> program_;
  std::vector<BasicBlock> blocks_;
  std::vector<Edge> edges_;
  int entry_ = 0;
  std::set<int> exits_;
};

namespace detail {

class CfgBuilder {
 public:
  explicit CfgBuilder(const minilang::TypedProgram& prog)
      : program_(std::make_shared<minilang::TypedProgram>(prog)) {}

  void build(Cfg& cfg) {
    const int entry = new_block();
    const int tail = build_block(program_->program.body, entry);
    (void)tail;  // typechecker guarantees every path ends in a return
    cfg.program_ = program_;
    cfg.blocks_ = std::move(blocks_);
    cfg.edges_ = std::move(edges_);
    cfg.entry_ = entry;
    cfg.exits_ = std::move(exits_);
  }

 private:
  int new_block() {
    blocks_.emplace_back();
    return static_cast<int>(blocks_.size()) - 1;
  }

  void add_edge(int from, int to, EdgeLabel label) { edges_.push_back({from, to, label}); }

  // Appends the statement run to `cur`; returns the open continuation block,
  // or -1 when every path through these statements returned.
  int build_block(const std::vector<minilang::Stmt>& stmts, int cur) {
    using namespace minilang;
    for (const auto& s : stmts) {
      if (const auto* a = std::get_if<Assign>(&s.node)) {
        (void)a;
        blocks_[cur].stmts.push_back(&s);
        continue;
      }
      if (const auto* i = std::get_if<If>(&s.node)) {
        blocks_[cur].term = BasicBlock::Term::Branch;
        blocks_[cur].cond = i->cond;
        const int then_entry = new_block();
        const int else_entry = new_block();
        add_edge(cur, then_entry, EdgeLabel::BranchTrue);
        add_edge(cur, else_entry, EdgeLabel::BranchFalse);
        const int then_tail = build_block(i->then_body, then_entry);
        const int else_tail = build_block(i->else_body, else_entry);
        if (then_tail < 0 && else_tail < 0) return -1;
        const int join = new_block();
        if (then_tail >= 0) add_edge(then_tail, join, EdgeLabel::Fallthrough);
        if (else_tail >= 0) add_edge(else_tail, join, EdgeLabel::Fallthrough);
        cur = join;
        continue;
      }
      if (const auto* w = std::get_if<While>(&s.node)) {
        const int header = new_block();
        blocks_[header].term = BasicBlock::Term::Branch;
        blocks_[header].cond = w->cond;
        blocks_[header].is_loop_header = true;
        add_edge(cur, header, EdgeLabel::Fallthrough);
        const int body_entry = new_block();
        const int after = new_block();
        add_edge(header, body_entry, EdgeLabel::BranchTrue);
        add_edge(header, after, EdgeLabel::BranchFalse);
        const int body_tail = build_block(w->body, body_entry);
        if (body_tail >= 0) add_edge(body_tail, header, EdgeLabel::Fallthrough);
        cur = after;
        continue;
      }
      const auto& r = std::get<Return>(s.node);
      blocks_[cur].term = BasicBlock::Term::Return;
      blocks_[cur].return_value = r.value;
      exits_.insert(cur);
      return -1;
    }
    return cur;
  }

  std::shared_ptr<minilang::TypedProgram> program_;
  std::vector<BasicBlock> blocks_;
  std::vector<Edge> edges_;
  std::set<int> exits_;
};

}  // namespace detail

inline Cfg build_cfg(const minilang::TypedProgram& prog) {
  Cfg cfg;
  detail::CfgBuilder(prog).build(cfg);
  return cfg;
}

// All entry-to-exit paths in which no loop header's body is entered more than
// loop_bound times. Deterministic depth-first order, BranchTrue explored
// before BranchFalse.
inline std::vector<PathDescriptor> enumerate_paths(const Cfg& cfg, int loop_bound,
                                                   std::size_t path_cap = kDefaultPathCap) {
  if (loop_bound < 0) throw DomainError("loop_bound must be non-negative");
  std::vector<PathDescriptor> out;
  PathDescriptor current;
  std::map<int, int> iter_counts;

  // Explicit recursion keeps the exploration order obvious.
  auto walk = [&](auto&& self, int block) -> void {
    current.blocks.push_back(block);
    const BasicBlock& b = cfg.blocks()[block];
    if (b.term == BasicBlock::Term::Return) {
      if (out.size() >= path_cap) throw PathExplosionError(path_cap);
      PathDescriptor done = current;
      for (const auto& [header, count] : iter_counts)
        if (count > 0) done.loop_iterations[header] = count;
      out.push_back(std::move(done));
      current.blocks.pop_back();
      return;
    }
    if (b.term == BasicBlock::Term::Jump) {
      self(self, cfg.successor(block, EdgeLabel::Fallthrough));
      current.blocks.pop_back();
      return;
    }
    // Branch
    const bool bounded = !b.is_loop_header || iter_counts[block] < loop_bound;
    if (bounded) {
      if (b.is_loop_header) ++iter_counts[block];
      current.edge_choices.push_back(BranchDir::True);
      self(self, cfg.successor(block, EdgeLabel::BranchTrue));
      current.edge_choices.pop_back();
      if (b.is_loop_header) --iter_counts[block];
    }
    current.edge_choices.push_back(BranchDir::False);
    self(self, cfg.successor(block, EdgeLabel::BranchFalse));
    current.edge_choices.pop_back();
    current.blocks.pop_back();
  };
  walk(walk, cfg.entry());
  return out;
}

// Reconstructs the descriptor a concrete branch trace corresponds to, or
// nullopt when the trace does not walk entry-to-exit through this graph.
inline std::optional<PathDescriptor> descriptor_for_trace(
    const Cfg& cfg, const std::vector<BranchDir>& trace) {
  PathDescriptor d;
  int block = cfg.entry();
  std::size_t next = 0;
  while (true) {
    d.blocks.push_back(block);
    const BasicBlock& b = cfg.blocks()[block];
    if (b.term == BasicBlock::Term::Return) {
      if (next != trace.size()) return std::nullopt;
      return d;
    }
    if (b.term == BasicBlock::Term::Jump) {
      block = cfg.successor(block, EdgeLabel::Fallthrough);
      continue;
    }
    if (next >= trace.size()) return std::nullopt;
    const BranchDir dir = trace[next++];
    d.edge_choices.push_back(dir);
    if (b.is_loop_header && dir == BranchDir::True) ++d.loop_iterations[block];
    block = cfg.successor(
        block, dir == BranchDir::True ? EdgeLabel::BranchTrue : EdgeLabel::BranchFalse);
  }
}

}  // namespace sympref
