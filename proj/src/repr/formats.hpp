#pragma once

#include <string>
#include <string_view>

#include "cadseq/repr.hpp"

// Per-format entry points. Printers expect a canonical model.
namespace cadseq::detail {

ParseOutcome parse_json(std::string_view text);
std::string print_json(const CadModel &model);

ParseOutcome parse_dsl(std::string_view text);
std::string print_dsl(const CadModel &model);

ParseOutcome parse_st(std::string_view text);
std::string print_st(const CadModel &model);

ParseOutcome parse_gpl(std::string_view text);
std::string print_gpl(const CadModel &model);

}  // namespace cadseq::detail
