#pragma once

#include "asmnav/core/address_range.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace asmnav::selection {

/// Static augmented interval tree over half-open address ranges.
///
/// Entries are sorted by start and laid out as an implicit balanced BST (the
/// midpoint of each subarray is the subtree root). Each root stores the largest
/// end in its subtree, so overlap queries prune whole subtrees. Build with
/// insert() and then freeze(); queries on a frozen tree are const and safe to
/// run concurrently.
template <class Value>
class IntervalTree {
public:
    struct Entry {
        AddressRange range;
        Value value;
    };

    void insert(AddressRange range, Value value)
    {
        entries_.push_back({range, std::move(value)});
        frozen_ = false;
    }

    void freeze()
    {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const Entry& a, const Entry& b) { return a.range.start < b.range.start; });
        max_end_.assign(entries_.size(), 0);
        build(0, entries_.size());
        frozen_ = true;
    }

    bool frozen() const { return frozen_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Calls visit(entry) for every stored range overlapping `query`.
    template <class Visitor>
    void for_each_overlap(AddressRange query, Visitor&& visit) const
    {
        assert(frozen_ && "freeze() the tree before querying");
        if (query.valid())
            search(0, entries_.size(), query, visit);
    }

    std::vector<Value> query(AddressRange query) const
    {
        std::vector<Value> out;
        for_each_overlap(query, [&](const Entry& e) { out.push_back(e.value); });
        return out;
    }

    std::vector<Value> stab(Address address) const
    {
        if (address == ~Address{0})
            return {};
        return query({address, address + 1});
    }

private:
    std::vector<Entry> entries_;
    std::vector<Address> max_end_;
    bool frozen_ = true;

    Address build(std::size_t lo, std::size_t hi)
    {
        if (lo >= hi)
            return 0;
        auto mid = lo + (hi - lo) / 2;
        auto m = std::max({entries_[mid].range.end, build(lo, mid), build(mid + 1, hi)});
        max_end_[mid] = m;
        return m;
    }

    template <class Visitor>
    void search(std::size_t lo, std::size_t hi, AddressRange q, Visitor& visit) const
    {
        while (lo < hi) {
            auto mid = lo + (hi - lo) / 2;
            if (max_end_[mid] <= q.start)
                return;
            search(lo, mid, q, visit);
            if (entries_[mid].range.start >= q.end)
                return; // everything to the right starts even later
            if (entries_[mid].range.overlaps(q))
                visit(entries_[mid]);
            lo = mid + 1;
        }
    }
};

} // namespace asmnav::selection
