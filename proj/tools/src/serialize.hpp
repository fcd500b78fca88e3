#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "lcrip/block_net.hpp"
#include "lcrip/ensembles.hpp"
#include "lcrip/recovery.hpp"
#include "lcrip/sparse_norms.hpp"
#include "lcrip/tailcheck.hpp"

namespace lcrip::cli {

using json = nlohmann::ordered_json;

/// Header plus rows; numbers are written in shortest round-trip form.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

void write_csv(std::ostream& out, const Table& table);

json to_json(const IsotropyReport& r);
json to_json(const SurvivalCurve& c);
json to_json(const CalibrationReport& c);
json to_json(const TailReport& r);
json to_json(const CountMomentsReport& r);
json to_json(const WeightedSumReport& r);
json to_json(const KlsReport& r);
json to_json(const SubmatrixResult& r);
json to_json(const RipResult& r);
json to_json(const BlockSizes& b);
json to_json(const RipAdmissibility& r);
json to_json(const RipCertificate& c);
json to_json(const PhaseDiagram& d);

Table curve_table(const TailReport& r);

}  // namespace lcrip::cli
