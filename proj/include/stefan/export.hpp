#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "stefan/experiment.hpp"

namespace stefan {

class ExportError : public std::runtime_error {
 public:
  ExportError(std::filesystem::path path, const std::string& what);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Decimal, round-trippable ("%.17g"); "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Writes via a sibling temporary and rename. Throws ExportError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// fields.csv (time,x,T), fronts.csv, scalars.csv, meta.ini.
void export_trace(const CartesianResult& result, const ExperimentSpec& spec, const std::filesystem::path& dir);
/// fields.csv (time,T,H), scalars.csv (quantity,value), meta.ini.
void export_trace(const LumpedResult& result, const ExperimentSpec& spec, const std::filesystem::path& dir);
/// fields.csv (time,r,T_e,T_i), fronts.csv (lattice), scalars.csv, meta.ini.
void export_trace(const SpikeResult& result, const ExperimentSpec& spec, const std::filesystem::path& dir);
/// convergence.csv and meta.ini.
void export_convergence(const ConvergenceResult& result, const ExperimentSpec& spec,
                        const std::filesystem::path& dir);
/// instability.csv: time, front, then shift/sensitivity/flag per epsilon.
void export_instability(const CartesianResult& result, const std::vector<InstabilityTable>& tables,
                        const std::filesystem::path& dir);

std::string fields_csv(const SimulationTrace& trace);
std::string fronts_csv(const PhaseFrontTrace& fronts);
std::string scalars_csv(const CartesianResult& result);

}  // namespace stefan
