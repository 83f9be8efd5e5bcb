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

#include "hpmstack/platform.hpp"

#include <charconv>
#include <fstream>
#include <set>
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

  std::vector<std::string_view> split_ws(std::string_view s)
  {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size())
      {
        while (i < s.size() and (s[i] == ' ' or s[i] == '\t'))
          ++i;
        size_t start = i;
        while (i < s.size() and s[i] != ' ' and s[i] != '\t')
          ++i;
        if (i > start)
          out.push_back(s.substr(start, i - start));
      }
    return out;
  }

  uint64_t parse_u64(std::string_view token, unsigned line_no, const char* key)
  {
    int base = 10;
    std::string_view digits = token;
    if (digits.starts_with("0x") or digits.starts_with("0X"))
      {
        base = 16;
        digits.remove_prefix(2);
      }
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
    if (ec != std::errc() or ptr != digits.data() + digits.size() or digits.empty())
      {
        std::ostringstream os;
        os << "platform description line " << line_no << ": bad number '" << token
           << "' for " << key;
        throw ParseError(os.str());
      }
    return value;
  }

}


void
validate(const PlatformDescription& platform)
{
  if (platform.xlen != 32 and platform.xlen != 64)
    throw ValidationError("xlen must be 32 or 64");
  if (platform.base_counter_width < 1 or platform.base_counter_width > 64)
    throw ValidationError("base_counter_width must be within 1..64");
  if (platform.event_counter_width > 64)
    throw ValidationError("event_counter_width must be within 0..64");
  if (platform.num_event_counters > 29)
    throw ValidationError("num_event_counters must be within 0..29");
  if (platform.num_event_counters + 3 > 32)
    throw ValidationError("num_event_counters + 3 must fit the 32-bit counter masks");

  std::set<unsigned> bound;
  for (const auto& [code, idx] : platform.fixed_bindings)
    {
      if (idx < 3 or idx >= 3 + platform.num_event_counters)
        {
          std::ostringstream os;
          os << "fixed_binding counter " << idx << " is not an implemented event counter";
          throw ValidationError(os.str());
        }
      if (not bound.insert(idx).second)
        {
          std::ostringstream os;
          os << "fixed_binding counter " << idx << " bound twice";
          throw ValidationError(os.str());
        }
      (void)code;
    }
}


PlatformDescription
load_platform(const std::string& document)
{
  PlatformDescription platform;
  std::set<std::string> seen;

  std::istringstream in(document);
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

      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        {
          std::ostringstream os;
          os << "platform description line " << line_no << ": expected 'key = value'";
          throw ParseError(os.str());
        }
      std::string key{trim(line.substr(0, eq))};
      std::string_view value = trim(line.substr(eq + 1));
      if (key.empty() or value.empty())
        {
          std::ostringstream os;
          os << "platform description line " << line_no << ": empty key or value";
          throw ParseError(os.str());
        }

      auto scalar = [&](unsigned& field) {
        if (not seen.insert(key).second)
          {
            std::ostringstream os;
            os << "platform description line " << line_no << ": duplicate key '" << key << "'";
            throw ParseError(os.str());
          }
        field = unsigned(parse_u64(value, line_no, key.c_str()));
      };
      auto scalar64 = [&](uint64_t& field) {
        if (not seen.insert(key).second)
          {
            std::ostringstream os;
            os << "platform description line " << line_no << ": duplicate key '" << key << "'";
            throw ParseError(os.str());
          }
        field = parse_u64(value, line_no, key.c_str());
      };

      if (key == "xlen")
        scalar(platform.xlen);
      else if (key == "base_counter_width")
        scalar(platform.base_counter_width);
      else if (key == "event_counter_width")
        scalar(platform.event_counter_width);
      else if (key == "num_event_counters")
        scalar(platform.num_event_counters);
      else if (key == "marchid")
        scalar64(platform.marchid);
      else if (key == "mimpid")
        scalar64(platform.mimpid);
      else if (key == "fixed_binding")
        {
          auto fields = split_ws(value);
          if (fields.size() != 2)
            {
              std::ostringstream os;
              os << "platform description line " << line_no
                 << ": fixed_binding wants '<event code> <counter index>'";
              throw ParseError(os.str());
            }
          uint64_t code = parse_u64(fields[0], line_no, "fixed_binding event code");
          unsigned idx = unsigned(parse_u64(fields[1], line_no, "fixed_binding counter index"));
          platform.fixed_bindings.emplace_back(code, idx);
        }
      else if (key == "hardware_event" or key == "cache_event")
        {
          auto fields = split_ws(value);
          if (fields.size() != 2)
            {
              std::ostringstream os;
              os << "platform description line " << line_no << ": " << key
                 << " wants '<name> <event code>'";
              throw ParseError(os.str());
            }
          uint64_t code = parse_u64(fields[1], line_no, key.c_str());
          auto& map = key == "hardware_event" ? platform.hardware_event_map
                                              : platform.hardware_cache_event_map;
          map.emplace_back(std::string(fields[0]), code);
        }
      else
        {
          std::ostringstream os;
          os << "platform description line " << line_no << ": unknown key '" << key << "'";
          throw ParseError(os.str());
        }
    }

  for (const char* required : {"xlen", "base_counter_width", "event_counter_width",
                               "num_event_counters", "marchid", "mimpid"})
    if (not seen.contains(required))
      throw ValidationError(std::string("missing required key '") + required + "'");

  validate(platform);
  return platform;
}


PlatformDescription
load_platform_file(const std::string& path)
{
  std::ifstream in(path);
  if (not in)
    throw ParseError("cannot open platform description: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_platform(buf.str());
}

}
