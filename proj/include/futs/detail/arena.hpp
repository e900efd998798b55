#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "futs/semiring.hpp"

namespace futs::detail {

/// Hash-consing store: structurally equal terms intern to one node, so term
/// equality is pointer equality and every node carries a stable StateId.
/// T must expose `std::string key` (structural, set before interning) and
/// `StateId id` (assigned here).
template <typename T>
class Arena {
public:
    Arena() = default;
    Arena(Arena&&) noexcept = default;
    Arena& operator=(Arena&&) noexcept = default;
    Arena(const Arena&) = delete;
    Arena& operator=(const Arena&) = delete;

    const T* intern(T node) {
        auto it = index_.find(node.key);
        if (it != index_.end()) return items_[it->second].get();
        node.id = StateId{static_cast<std::uint32_t>(items_.size())};
        items_.push_back(std::make_unique<T>(std::move(node)));
        index_.emplace(items_.back()->key, items_.size() - 1);
        return items_.back().get();
    }

    const T* by_id(StateId id) const { return items_.at(id.value).get(); }
    std::size_t size() const { return items_.size(); }

private:
    std::vector<std::unique_ptr<T>> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace futs::detail
