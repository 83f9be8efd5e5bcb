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

#include "hpmstack/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace hpmstack
{

namespace
{

  std::string_view trim(std::string_view s)
  {
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  }

  std::string to_upper(std::string_view s)
  {
    std::string out(s);
    for (char& c : out)
      c = char(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }

  bool ci_equal(std::string_view a, std::string_view b)
  {
    if (a.size() != b.size())
      return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(a[i])) !=
          std::toupper(static_cast<unsigned char>(b[i])))
        return false;
    return true;
  }

  std::optional<uint64_t> try_parse_u64(std::string_view token)
  {
    int base = 10;
    std::string_view digits = token;
    if (digits.starts_with("0x") or digits.starts_with("0X"))
      {
        base = 16;
        digits.remove_prefix(2);
      }
    if (digits.empty())
      return std::nullopt;
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
    if (ec != std::errc() or ptr != digits.data() + digits.size())
      return std::nullopt;
    return value;
  }

  uint64_t json_number(const nlohmann::json& value, const std::string& file, const char* key)
  {
    if (value.is_number_unsigned())
      return value.get<uint64_t>();
    if (value.is_string())
      if (auto parsed = try_parse_u64(trim(value.get<std::string>())))
        return *parsed;
    throw ParseError(file + ": key '" + std::string(key) + "' is not a number");
  }

  std::vector<EventDescriptor> parse_event_file(const fs::path& path,
                                                std::vector<std::string>& warnings)
  {
    std::ifstream in(path);
    if (not in)
      throw ParseError("cannot open event file: " + path.string());

    nlohmann::json doc;
    try
      {
        doc = nlohmann::json::parse(in);
      }
    catch (const nlohmann::json::exception& e)
      {
        throw ParseError(path.string() + ": " + e.what());
      }

    std::vector<nlohmann::json> objects;
    if (doc.is_array())
      objects.assign(doc.begin(), doc.end());
    else if (doc.is_object())
      objects.push_back(doc);
    else
      throw ParseError(path.string() + ": expected an object or an array of objects");

    std::vector<EventDescriptor> events;
    for (const auto& obj : objects)
      {
        if (not obj.is_object())
          throw ParseError(path.string() + ": event entries must be objects");

        EventDescriptor event;
        event.group = path.stem().string();
        bool have_name = false, have_code = false, have_mask = false;
        for (const auto& [key, value] : obj.items())
          {
            if (key == "Event Name")
              {
                event.name = to_upper(trim(value.is_string() ? value.get<std::string>() : std::string{}));
                have_name = not event.name.empty();
                for (char c : event.name)
                  if (not(std::isalnum(static_cast<unsigned char>(c)) or c == '_'))
                    throw ParseError(path.string() + ": event name '" + event.name +
                                     "' is not [A-Z0-9_]");
              }
            else if (key == "Event Code")
              {
                event.event_code = json_number(value, path.string(), "Event Code");
                have_code = true;
              }
            else if (key == "Counter Mask")
              {
                uint64_t mask = json_number(value, path.string(), "Counter Mask");
                if (mask > 0xFFFFFFFFull)
                  throw ParseError(path.string() + ": 'Counter Mask' exceeds 32 bits");
                event.counter_map = uint32_t(mask);
                have_mask = true;
              }
            else if (key == "Brief Description")
              event.brief = value.is_string() ? value.get<std::string>() : value.dump();
            else if (key == "Public Description")
              event.public_description = value.is_string() ? value.get<std::string>() : value.dump();
            else
              warnings.push_back(path.string() + ": ignoring unknown key '" + key + "'");
          }
        if (not have_name)
          throw ParseError(path.string() + ": missing key 'Event Name'");
        if (not have_code)
          throw ParseError(path.string() + ": missing key 'Event Code' for " + event.name);
        if (not have_mask)
          throw ParseError(path.string() + ": missing key 'Counter Mask' for " + event.name);
        events.push_back(std::move(event));
      }
    return events;
  }

  EventCatalog load_dir(const std::string& dir, const PlatformDescription* platform)
  {
    if (not fs::is_directory(dir))
      throw ParseError("event directory does not exist: " + dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() and entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<std::string> warnings;
    std::vector<EventDescriptor> events;
    std::set<std::string> names;
    for (const auto& file : files)
      for (auto& event : parse_event_file(file, warnings))
        {
          if (not names.insert(event.name).second)
            throw DuplicateEventName("duplicate event name: " + event.name);
          if (platform)
            {
              if (usable_counters(event, *platform).empty())
                throw InvalidMask("event " + event.name +
                                  ": counter mask excludes every implemented counter");
            }
          else if (event.counter_map == 0xFFFFFFFFu)
            throw InvalidMask("event " + event.name + ": counter mask excludes every counter");
          events.push_back(std::move(event));
        }

    EventCatalog catalog(std::move(events));
    for (auto& w : warnings)
      catalog.add_warning(std::move(w));
    return catalog;
  }

}


std::vector<MapfileEntry>
parse_mapfile(const std::string& text)
{
  std::vector<MapfileEntry> entries;
  std::set<uint32_t> seen;

  std::istringstream in(text);
  std::string raw;
  unsigned line_no = 0;
  while (std::getline(in, raw))
    {
      ++line_no;
      std::string_view line = trim(raw);
      if (line.empty() or line.front() == '#')
        continue;

      std::vector<std::string> fields;
      size_t start = 0;
      while (true)
        {
          size_t comma = line.find(',', start);
          fields.emplace_back(trim(line.substr(start, comma - start)));
          if (comma == std::string_view::npos)
            break;
          start = comma + 1;
        }

      // Optional header row.
      if (line_no == 1 or entries.empty())
        if (not fields.empty() and ci_equal(fields[0], "CPU ID"))
          continue;

      if (fields.size() != 4)
        {
          std::ostringstream os;
          os << "mapfile line " << line_no << ": expected 4 comma-separated fields, got "
             << fields.size();
          throw ParseError(os.str());
        }

      auto id = try_parse_u64(fields[0]);
      if (not id or *id > 0xFFFFFFFFull)
        {
          std::ostringstream os;
          os << "mapfile line " << line_no << ": bad CPU ID '" << fields[0] << "'";
          throw ParseError(os.str());
        }
      auto version = try_parse_u64(fields[1]);
      if (not version)
        {
          std::ostringstream os;
          os << "mapfile line " << line_no << ": bad file version '" << fields[1] << "'";
          throw ParseError(os.str());
        }
      if (fields[2].empty() or fields[3].empty())
        {
          std::ostringstream os;
          os << "mapfile line " << line_no << ": empty events filename or type";
          throw ParseError(os.str());
        }
      if (not seen.insert(uint32_t(*id)).second)
        {
          std::ostringstream os;
          os << "mapfile line " << line_no << ": duplicate CPU ID 0x" << std::hex << *id;
          throw DuplicateCpuId(os.str());
        }
      entries.push_back(MapfileEntry{CpuId{uint32_t(*id)}, int(*version), fields[2], fields[3]});
    }
  return entries;
}


std::vector<MapfileEntry>
load_mapfile(const std::string& path)
{
  std::ifstream in(path);
  if (not in)
    throw ParseError("cannot open mapfile: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mapfile(buf.str());
}


EventCatalog::EventCatalog(std::vector<EventDescriptor> events)
  : events_(std::move(events))
{
  std::sort(events_.begin(), events_.end(),
            [](const EventDescriptor& a, const EventDescriptor& b) { return a.name < b.name; });
}


const EventDescriptor*
EventCatalog::find(std::string_view name) const
{
  for (const auto& event : events_)
    if (ci_equal(event.name, name))
      return &event;
  return nullptr;
}


EventCatalog
load_event_dir(const std::string& dir)
{
  return load_dir(dir, nullptr);
}


EventCatalog
load_event_dir(const std::string& dir, const PlatformDescription& platform)
{
  return load_dir(dir, &platform);
}


std::vector<unsigned>
usable_counters(uint32_t counter_map, const PlatformDescription& platform)
{
  std::vector<unsigned> usable;
  for (unsigned idx = 0; idx < 32; ++idx)
    {
      if ((counter_map >> idx) & 1)
        continue;
      if (not platform.counter_implemented(idx))
        continue;
      usable.push_back(idx);
    }
  return usable;
}


ResolvedEvent
resolve(const EventCatalog& catalog, std::string_view spec)
{
  if (const EventDescriptor* event = catalog.find(spec))
    return ResolvedEvent{event->name, event->event_code, event->counter_map};

  // Raw spec: r<hexcode>[:<mask>]
  if (spec.size() > 1 and (spec[0] == 'r' or spec[0] == 'R'))
    {
      std::string_view body = spec.substr(1);
      std::string_view code_part = body;
      std::optional<uint64_t> mask;
      if (auto colon = body.find(':'); colon != std::string_view::npos)
        {
          code_part = body.substr(0, colon);
          mask = try_parse_u64(body.substr(colon + 1));
          if (not mask or *mask > 0xFFFFFFFFull)
            throw UnknownEvent("bad counter mask in raw event spec: " + std::string(spec));
        }
      // The code digits are hex, with or without 0x.
      std::string code_token = code_part.starts_with("0x") or code_part.starts_with("0X")
                                 ? std::string(code_part)
                                 : "0x" + std::string(code_part);
      if (auto code = try_parse_u64(code_token))
        return ResolvedEvent{std::string(spec), *code,
                             mask ? uint32_t(*mask) : raw_default_counter_map};
    }

  throw UnknownEvent("unknown event: " + std::string(spec));
}


uint64_t
encode_raw(uint64_t event_code, uint32_t counter_map)
{
  if (event_code > 0xFFFFFFFFull)
    throw Overflow("raw event code does not fit 32 bits");
  return (uint64_t(counter_map) << 32) | event_code;
}


std::pair<uint64_t, uint32_t>
decode_raw(uint64_t config)
{
  return {config & 0xFFFFFFFFull, uint32_t(config >> 32)};
}

}
