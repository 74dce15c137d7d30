#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "s2k/errors.hpp"

namespace s2k::nn {

// Reverse-mode autodiff over eagerly evaluated tensors. Every op
// computes its value at build time and records a closure that scatters
// the output gradient into its parents, so a fresh graph is built per
// step (define-by-run). Templated on the scalar so training runs float
// while gradient checks run double.
template <class T>
struct Node {
  std::vector<int> shape;
  std::vector<T> val;
  std::vector<T> grad;  // sized like val iff requires_grad
  bool requires_grad = false;
  std::string name;  // stable names for parameters; empty elsewhere

  std::vector<std::shared_ptr<Node<T>>> parents;
  std::function<void()> backprop;  // accumulates into parents' grad

  std::size_t count() const { return val.size(); }

  void set_requires_grad(bool on) {
    requires_grad = on;
    if (on)
      grad.assign(val.size(), T(0));
    else
      grad.clear();
  }

  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

template <class T>
using Var = std::shared_ptr<Node<T>>;

inline std::size_t shape_count(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= std::size_t(d);
  return n;
}

template <class T>
Var<T> make_var(std::vector<int> shape, bool requires_grad = false,
                std::string name = {}) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->val.assign(shape_count(node->shape), T(0));
  node->name = std::move(name);
  node->set_requires_grad(requires_grad);
  return node;
}

template <class T>
Var<T> constant(std::vector<int> shape, std::vector<T> data) {
  auto node = make_var<T>(std::move(shape), false);
  if (data.size() != node->count())
    throw InvalidArgument("constant: data does not match shape");
  node->val = std::move(data);
  return node;
}

// Every op calls this on its output; training must fail loudly the
// moment a non-finite value appears rather than silently diverge.
template <class T>
void check_finite(const Node<T>& node, const char* op) {
  for (T v : node.val)
    if (!std::isfinite(double(v)))
      throw Error(std::string("non-finite value produced by ") + op +
                  (node.name.empty() ? "" : " (" + node.name + ")"));
}

// Runs reverse-mode accumulation from a scalar root: zeroes every grad
// reachable from the root, seeds the root with 1, then replays the tape
// in reverse topological order.
template <class T>
void backward(const Var<T>& root) {
  if (!root || root->count() != 1)
    throw InvalidArgument("backward: root must be a scalar");

  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  // Iterative DFS; graphs are a few hundred nodes but recursion depth
  // should not depend on that.
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* n : order)
    if (n->requires_grad) n->zero_grad();

  if (!root->requires_grad)
    throw InvalidArgument("backward: root does not require grad");
  root->grad[0] = T(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop();
}

}  // namespace s2k::nn
