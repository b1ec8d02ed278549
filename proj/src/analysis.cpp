#include "pircache/analysis.hpp"

#include <stdexcept>

namespace pircache {

ConverseTerms<Rational> converse_bound_realization(const StorageSetPartition& partition) {
  const std::size_t files = partition.files;
  const std::size_t file_bits = partition.file_bits;
  const std::size_t databases = partition.databases;

  std::vector<bool> covered(files * file_bits, false);
  std::vector<std::uint64_t> bits_by_size(databases + 2, 0);
  for (const auto& entry : partition.entries) {
    if (entry.positions.size() != files)
      throw std::invalid_argument("partition entry does not list every file");
    for (std::size_t k = 0; k < files; ++k) {
      for (auto pos : entry.positions[k]) {
        if (pos >= file_bits || covered[k * file_bits + pos])
          throw std::invalid_argument("partition is not a disjoint cover");
        covered[k * file_bits + pos] = true;
      }
    }
    bits_by_size.at(entry.set.size()) += entry.total_bits();
  }
  for (bool c : covered)
    if (!c) throw std::invalid_argument("partition is not a disjoint cover");

  ConverseTerms<Rational> out;
  out.bound = Rational(file_bits);
  for (std::size_t l = 1; l <= databases + 1; ++l) {
    const Rational count = binomial<Rational>(databases + 1, l);
    const Rational x = Rational(bits_by_size[l]) / (Rational(files) * count);
    const Rational h = harmonic_weight<Rational>(files, l);
    out.x.push_back(x);
    out.weights.push_back(h);
    out.bound += count * h * x;
  }
  return out;
}

namespace {

// H(W_k | Z_C) for uncoded caches: the number of bits of file k held by no
// database in C, or zero when the data center is in C.
std::uint64_t missing_bits(const CacheRealization& realization, std::size_t file,
                           std::size_t file_bits, std::initializer_list<std::size_t> conditioning) {
  std::vector<bool> held(file_bits, false);
  for (std::size_t db : conditioning) {
    if (db == 0) return 0;
    for (const auto& a : realization.sets.at(db - 1))
      if (a.file == file) held[a.position] = true;
  }
  return static_cast<std::uint64_t>(std::count(held.begin(), held.end(), false));
}

}  // namespace

Rational converse_bound_three_files_two_databases(const CacheRealization& realization,
                                                  std::size_t file_bits) {
  if (realization.databases() != 2)
    throw std::invalid_argument("specialized bound needs exactly two databases");
  check_realization(realization, 3, file_bits);

  Rational single(0);
  Rational complement(0);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i <= 2; ++i) single += missing_bits(realization, k, file_bits, {i});
    complement += missing_bits(realization, k, file_bits, {1, 2});  // i = 0
    complement += missing_bits(realization, k, file_bits, {0, 2});  // i = 1
    complement += missing_bits(realization, k, file_bits, {0, 1});  // i = 2
  }
  const Rational total(3 * file_bits);
  return Rational(file_bits) + Rational(4, 27) * total + Rational(11, 108) * single +
         Rational(17, 54) * complement;
}

}  // namespace pircache
