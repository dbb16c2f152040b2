#include "ptsim/ptree.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ptsim {

bool is_partition_code(const Bits& code, std::size_t k) {
  if (k == 0) throw std::invalid_argument("is_partition_code: k = 0");
  if (code.size() % k != 0) throw std::invalid_argument("is_partition_code: length not a multiple of k");
  std::size_t len = code.size() / k;
  for (std::size_t x = 0; x < len; ++x) {
    bool covered = false;
    for (std::size_t j = 0; j < k && !covered; ++j) covered = code.at(k * x + j);
    if (!covered) return false;
  }
  return true;
}

PartitionTree full_partition_tree(std::size_t k, std::size_t depth) {
  if (k == 0) throw std::invalid_argument("full_partition_tree: k = 0");
  PartitionTree t{k, depth, {}};
  std::vector<Bits> level{Bits()};
  t.nodes.insert(Bits());
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Bits> next;
    for (const Bits& node : level) {
      // every non-zero membership pattern covers the new position
      for (unsigned long pat = 1; pat < (1ul << k); ++pat) {
        Bits child = node;
        for (std::size_t j = 0; j < k; ++j) child.push_back((pat >> j) & 1u);
        t.nodes.insert(child);
        next.push_back(child);
      }
    }
    level = std::move(next);
  }
  return t;
}

PartitionTree single_path_tree(std::size_t k, const Bits& path) {
  if (path.size() % k != 0) throw std::invalid_argument("single_path_tree: length not a multiple of k");
  if (!is_partition_code(path, k)) throw std::invalid_argument("single_path_tree: not a partition code");
  PartitionTree t{k, path.size() / k, {}};
  for (std::size_t d = 0; d <= t.depth; ++d) t.nodes.insert(path.prefix(k * d));
  return t;
}

bool nonempty_at_depth(const PartitionTree& t, std::size_t d) {
  if (d > t.depth) throw std::invalid_argument("nonempty_at_depth: level past tree depth");
  for (const Bits& node : t.nodes)
    if (node.size() == t.parts * d) return true;
  return false;
}

std::vector<Bits> nodes_at_level(const PartitionTree& t, std::size_t level) {
  std::vector<Bits> out;
  for (const Bits& node : t.nodes)
    if (node.size() == t.parts * level) out.push_back(node);
  return out;
}

PathSet paths_at_depth(const PartitionTree& t, std::size_t d) {
  if (d > t.depth) throw std::invalid_argument("paths_at_depth: level past tree depth");
  PathSet ps{t.parts, d, {}};
  for (const Bits& node : t.nodes)
    if (node.size() == t.parts * d) ps.codes.insert(node);
  return ps;
}

PartitionTree tree_from_paths(std::size_t parts, std::size_t depth, const std::set<Bits>& paths) {
  PartitionTree t{parts, depth, {}};
  for (const Bits& p : paths) {
    if (p.size() != parts * depth) throw std::invalid_argument("tree_from_paths: path of wrong length");
    for (std::size_t d = 0; d <= depth; ++d) t.nodes.insert(p.prefix(parts * d));
  }
  return t;
}

std::size_t cross_parts(std::size_t k, std::size_t n) { return k * (n * (n - 1) / 2); }

Bits cross_codes(const std::vector<Bits>& codes, std::size_t k) {
  std::size_t n = codes.size();
  if (n < 2) throw std::invalid_argument("cross_codes: need at least two codes");
  std::size_t len = codes[0].size();
  for (const Bits& c : codes)
    if (c.size() != len) throw std::invalid_argument("cross_codes: mismatched lengths");
  if (len % k != 0) throw std::invalid_argument("cross_codes: length not a multiple of k");
  std::size_t positions = len / k;
  std::size_t kk = cross_parts(k, n);
  Bits out = Bits::zeros(kk * positions);
  for (std::size_t x = 0; x < positions; ++x) {
    std::size_t part = 0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) {
          out.set(kk * x + part, codes[p].at(k * x + j) && codes[q].at(k * x + j));
          ++part;
        }
  }
  return out;
}

namespace {

void cross_product_rec(const std::vector<std::vector<Bits>>& paths, std::size_t idx,
                       std::vector<Bits>& tuple, std::size_t k, std::set<Bits>& out) {
  if (idx == paths.size()) {
    out.insert(cross_codes(tuple, k));
    return;
  }
  for (const Bits& p : paths[idx]) {
    tuple.push_back(p);
    cross_product_rec(paths, idx + 1, tuple, k, out);
    tuple.pop_back();
  }
}

}  // namespace

PartitionTree cross_trees(const std::vector<PartitionTree>& trees) {
  if (trees.size() < 2) throw std::invalid_argument("cross_trees: need at least two trees");
  std::size_t k = trees[0].parts;
  std::size_t depth = trees[0].depth;
  for (const PartitionTree& t : trees)
    if (t.parts != k || t.depth != depth)
      throw std::invalid_argument("cross_trees: mismatched parts or depth");
  std::vector<std::vector<Bits>> paths;
  paths.reserve(trees.size());
  for (const PartitionTree& t : trees) paths.push_back(nodes_at_level(t, depth));
  std::set<Bits> out_paths;
  std::vector<Bits> tuple;
  if (!paths.empty()) {
    bool any_empty = false;
    for (const auto& ps : paths) any_empty = any_empty || ps.empty();
    if (!any_empty) cross_product_rec(paths, 0, tuple, k, out_paths);
  }
  return tree_from_paths(cross_parts(k, trees.size()), depth, out_paths);
}

PartitionTree refine_below(const PartitionTree& t, std::size_t part, const Bits& tau,
                           RefineMode mode, const Bits& sigma) {
  if (part >= t.parts) throw std::invalid_argument("refine_below: part index out of range");
  if (sigma.size() > t.depth) throw std::invalid_argument("refine_below: stem longer than tree depth");
  std::set<Bits> kept;
  for (const Bits& path : nodes_at_level(t, t.depth)) {
    Bits xi = deinterleave(path, t.parts)[part];
    Bits reservoir = overwrite(xi, sigma);
    bool ok = mode == RefineMode::Prefix ? is_prefix(tau, reservoir) : subset_leq(tau, reservoir);
    if (ok) kept.insert(path);
  }
  return tree_from_paths(t.parts, t.depth, kept);
}

std::vector<std::string> tree_violations(const PartitionTree& t) {
  std::vector<std::string> out;
  if (t.parts == 0) {
    out.push_back("parts = 0");
    return out;
  }
  for (const Bits& node : t.nodes) {
    if (node.size() % t.parts != 0) {
      out.push_back("node length not a multiple of parts: " + node.text());
      continue;
    }
    if (node.size() > t.parts * t.depth) out.push_back("node deeper than tree depth: " + node.text());
    if (!is_partition_code(node, t.parts)) out.push_back("node is not a partition code: " + node.text());
    if (!node.empty() && !t.nodes.contains(node.prefix(node.size() - t.parts)))
      out.push_back("missing parent of node: " + node.text());
  }
  if (!t.nodes.empty() && !t.nodes.contains(Bits())) out.push_back("non-empty tree without root");
  return out;
}

void serialize_tree(std::ostream& os, const PartitionTree& t) {
  os << "k=" << t.parts << " depth=" << t.depth << "\n";
  for (const Bits& node : t.nodes) os << node.text() << "\n";
}

PartitionTree parse_tree(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("parse_tree: missing header");
  std::size_t k = 0, depth = 0;
  if (std::sscanf(header.c_str(), "k=%zu depth=%zu", &k, &depth) != 2)
    throw std::invalid_argument("parse_tree: bad header: " + header);
  PartitionTree t{k, depth, {}};
  std::string line;
  while (std::getline(is, line)) t.nodes.insert(Bits::from_text(line));
  auto bad = tree_violations(t);
  if (!bad.empty()) throw std::invalid_argument("parse_tree: " + bad.front());
  return t;
}

}  // namespace ptsim
