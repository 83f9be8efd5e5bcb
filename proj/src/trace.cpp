// Copyright 2026 The hpmstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hpmstack/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hpmstack
{

namespace
{

  std::string_view trim(std::string_view s)
  {
    while (not s.empty() and (s.front() == ' ' or s.front() == '\t'))
      s.remove_prefix(1);
    while (not s.empty() and (s.back() == ' ' or s.back() == '\t' or s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  }

  uint64_t parse_count(std::string_view token, unsigned line_no, const char* what)
  {
    if (not token.empty() and token.front() == '-')
      {
        std::ostringstream os;
        os << "trace line " << line_no << ": negative " << what << " '" << token << "'";
        throw ParseError(os.str());
      }
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, 10);
    if (ec != std::errc() or ptr != token.data() + token.size() or token.empty())
      {
        std::ostringstream os;
        os << "trace line " << line_no << ": bad " << what << " '" << token << "'";
        throw ParseError(os.str());
      }
    return value;
  }

  uint64_t parse_code(std::string_view token, unsigned line_no)
  {
    if (not(token.starts_with("0x") or token.starts_with("0X")) or token.size() <= 2)
      {
        std::ostringstream os;
        os << "trace line " << line_no << ": event code '" << token << "' must be 0x-hex";
        throw ParseError(os.str());
      }
    std::string_view digits = token.substr(2);
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, 16);
    if (ec != std::errc() or ptr != digits.data() + digits.size())
      {
        std::ostringstream os;
        os << "trace line " << line_no << ": bad event code '" << token << "'";
        throw ParseError(os.str());
      }
    return value;
  }

  // The CVA6/CoreMark reference run. Event codes are the shipped CVA6
  // catalog's (code = bound counter index).
  constexpr uint64_t coremark_cycles = 2'368'685'119;
  constexpr uint64_t coremark_instret = 1'467'339'227;

  constexpr std::pair<uint64_t, uint64_t> coremark_deltas[] = {
    {0x03, 8'443'755},     // L1 I-cache misses
    {0x04, 2'786'559},     // L1 D-cache misses
    {0x05, 6'869'722},     // I-TLB misses
    {0x06, 1'118},         // D-TLB misses
    {0x07, 229'104'327},   // loads
    {0x08, 64'628'214},    // stores
    {0x09, 22'486},        // exceptions taken
    {0x0A, 22'486},        // exception returns
    {0x0B, 236'011'286},   // branches and jumps
    {0x0C, 5'312'578},     // calls
    {0x0D, 1'406'812},     // returns
    {0x0E, 44'038'701},    // mispredicted branches
    {0x0F, 9'094'173},     // scoreboard full
    {0x10, 239'773'306},   // instruction fetch empty
  };

}


void
validate(const TraceSlice& slice, unsigned issue_bound)
{
  if (slice.cycles < 1)
    throw ValidationError("trace slice must cover at least one cycle");
  if (issue_bound > 0 and slice.instructions > slice.cycles * issue_bound)
    {
      std::ostringstream os;
      os << "trace slice retires " << slice.instructions << " instructions in "
         << slice.cycles << " cycles (issue bound " << issue_bound << ")";
      throw ValidationError(os.str());
    }
}


std::vector<TraceSlice>
parse_trace(const std::string& text, unsigned issue_bound)
{
  std::vector<TraceSlice> slices;

  std::istringstream in(text);
  std::string raw;
  unsigned line_no = 0;
  while (std::getline(in, raw))
    {
      ++line_no;
      std::string_view line = trim(raw);
      if (auto hash = line.find('#'); hash != std::string_view::npos)
        line = trim(line.substr(0, hash));
      if (line.empty())
        continue;

      std::istringstream tokens{std::string(line)};
      std::string cycles_tok, instret_tok;
      tokens >> cycles_tok >> instret_tok;
      if (not cycles_tok.starts_with("cycles=") or not instret_tok.starts_with("instret="))
        {
          std::ostringstream os;
          os << "trace line " << line_no << ": expected 'cycles=<n> instret=<n> [...]'";
          throw ParseError(os.str());
        }

      TraceSlice slice;
      slice.cycles = parse_count(std::string_view(cycles_tok).substr(7), line_no, "cycle count");
      slice.instructions =
        parse_count(std::string_view(instret_tok).substr(8), line_no, "instruction count");

      std::string delta_tok;
      while (tokens >> delta_tok)
        {
          auto colon = delta_tok.find(':');
          if (colon == std::string::npos)
            {
              std::ostringstream os;
              os << "trace line " << line_no << ": expected '<0xCODE>:<count>', got '"
                 << delta_tok << "'";
              throw ParseError(os.str());
            }
          uint64_t code = parse_code(std::string_view(delta_tok).substr(0, colon), line_no);
          uint64_t count =
            parse_count(std::string_view(delta_tok).substr(colon + 1), line_no, "event delta");
          slice.deltas[code] += count;
        }

      validate(slice, issue_bound);
      slices.push_back(std::move(slice));
    }
  return slices;
}


std::vector<TraceSlice>
load_trace(const std::string& path, unsigned issue_bound)
{
  std::ifstream in(path);
  if (not in)
    throw ParseError("cannot open trace: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), issue_bound);
}


std::vector<TraceSlice>
coremark_cva6_trace(uint64_t slices)
{
  if (slices < 1)
    throw ValidationError("slice count must be >= 1");

  std::vector<TraceSlice> out(slices);
  auto spread = [&](uint64_t total, auto&& assign) {
    uint64_t base = total / slices;
    uint64_t last = base + total % slices;   // remainder folds into the final slice
    for (uint64_t i = 0; i < slices; ++i)
      assign(out[i], i + 1 == slices ? last : base);
  };

  spread(coremark_cycles, [](TraceSlice& s, uint64_t v) { s.cycles = v; });
  spread(coremark_instret, [](TraceSlice& s, uint64_t v) { s.instructions = v; });
  for (const auto& [code, total] : coremark_deltas)
    {
      uint64_t c = code;
      spread(total, [c](TraceSlice& s, uint64_t v) {
        if (v > 0)
          s.deltas[c] = v;
      });
    }
  return out;
}

}
