#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "futs/syntax.hpp"

namespace futs::checks {

enum class Status { pass, fail, skip };

struct Item {
    std::size_t index = 0;
    Status status = Status::pass;
    std::string detail;
};

struct Report {
    std::string name;
    std::vector<Item> items;

    std::size_t passed() const;
    std::size_t failed() const;
    std::size_t skipped() const;
    bool ok() const { return failed() == 0; }
};

/// Sum laws of finite-support functions on random (phi, psi, pairing)
/// triples: total(phi+psi) = total(phi)+total(psi) and
/// total(phi|psi) = total(phi)*total(psi). One item per triple per semiring.
Report lemma21(std::uint64_t seed, std::size_t count);

/// Per PEPA source: total(futs_step(s,a)) equals the apparent rate r_a(s)
/// for every reachable state and alphabet action.
Report lemma53(const std::vector<std::string>& sources, std::size_t cap);

/// Per PEPA source: each FuTS continuation value equals the
/// multiplicity-weighted rate sum of the standard semantics.
Report lemma56(const std::vector<std::string>& sources, std::size_t cap);

/// Per PEPA source: strong-equivalence refinement (q-rate signatures over the
/// standard semantics) yields blockwise the same partition as FuTS refinement.
Report thm57(const std::vector<std::string>& sources, std::size_t cap);

/// Per IML source: action continuations match derivability, delay
/// continuations match cumulative Markovian rates.
Report lemma65(const std::vector<std::string>& sources, std::size_t cap);

/// Per IML source: T/R-based strong bisimulation refinement agrees blockwise
/// with FuTS refinement.
Report thm66(const std::vector<std::string>& sources, std::size_t cap);

}  // namespace futs::checks
