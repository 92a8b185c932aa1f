/**
 * @file midi.hpp
 * @brief Standard MIDI File (format 1) writer and the reader used to verify it.
 *
 * Layout: track 0 carries the tempo map, then one track per instrument in Track order.
 * Division is 480 ticks per quarter, matching the engine's tick grid.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "affpop/engine.hpp"
#include "affpop/error.hpp"

namespace affpop {

/// Channel and General MIDI program per track. Programs are playback hints only.
struct TrackPatch {
  int channel;
  int program;  // 0-based GM program, -1 for the drum channel
};

inline TrackPatch patch_for(Track t) {
  switch (t) {
    case Track::percussion: return {9, -1};
    case Track::bass: return {0, 33};          // Electric Bass (finger)
    case Track::strummed_gtr: return {1, 27};  // Electric Guitar (clean)
    case Track::plucked_gtr: return {2, 26};   // Electric Guitar (jazz)
    case Track::violins: return {3, 48};       // String Ensemble 1
    case Track::french_horn: return {4, 60};   // French Horn
  }
  return {0, 0};
}

namespace smf_detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
inline void put_vlq(std::vector<std::uint8_t>& out, std::uint64_t v) {
  std::array<std::uint8_t, 10> buf{};
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(v & 0x7F);
  while ((v >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>(0x80 | (v & 0x7F));
  while (n > 0) out.push_back(buf[--n]);
}
inline void put_chunk(std::vector<std::uint8_t>& out, const char* tag, const std::vector<std::uint8_t>& body) {
  out.insert(out.end(), tag, tag + 4);
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

struct RawEvent {
  Tick tick;
  int order;  // note-offs sort before note-ons at the same tick
  int pitch;
  std::array<std::uint8_t, 3> bytes;
};

inline std::vector<std::uint8_t> encode_track(const std::string& name, std::vector<RawEvent> events,
                                              std::vector<std::uint8_t> prelude = {}) {
  std::vector<std::uint8_t> body;
  put_vlq(body, 0);
  body.push_back(0xFF);
  body.push_back(0x03);
  put_vlq(body, name.size());
  body.insert(body.end(), name.begin(), name.end());
  body.insert(body.end(), prelude.begin(), prelude.end());
  std::stable_sort(events.begin(), events.end(), [](const RawEvent& a, const RawEvent& b) {
    return std::tie(a.tick, a.order, a.pitch) < std::tie(b.tick, b.order, b.pitch);
  });
  Tick last = 0;
  for (const auto& e : events) {
    put_vlq(body, static_cast<std::uint64_t>(e.tick - last));
    last = e.tick;
    if (e.bytes[0] == 0xFF) {
      // Set-tempo meta: FF 51 03 tt tt tt, value packed into pitch.
      body.insert(body.end(), {0xFF, 0x51, 0x03});
      const auto u = static_cast<std::uint32_t>(e.pitch);
      body.insert(body.end(), {static_cast<std::uint8_t>(u >> 16), static_cast<std::uint8_t>(u >> 8),
                               static_cast<std::uint8_t>(u)});
    } else {
      body.insert(body.end(), e.bytes.begin(), e.bytes.end());
    }
  }
  body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
  return body;
}

}  // namespace smf_detail

/// Encodes a sorted, non-overlapping stream. Same input, same bytes.
inline std::vector<std::uint8_t> write_smf(const EventStream& stream) {
  using namespace smf_detail;
  if (!std::is_sorted(stream.notes.begin(), stream.notes.end()))
    throw SerializationError("event stream is not sorted by onset");
  std::map<std::pair<Track, int>, Tick> busy_until;
  for (const auto& n : stream.notes) {
    if (n.pitch < 0 || n.pitch > 127) throw SerializationError("pitch " + std::to_string(n.pitch) + " out of range");
    if (n.velocity < 1 || n.velocity > 127)
      throw SerializationError("velocity " + std::to_string(n.velocity) + " out of range");
    if (n.onset < 0 || n.duration <= 0) throw SerializationError("note with negative onset or empty duration");
    auto& until = busy_until[{n.track, n.pitch}];
    if (n.onset < until)
      throw SerializationError("overlapping notes on " + std::string(to_string(n.track)) + " pitch " +
                               std::to_string(n.pitch) + " at tick " + std::to_string(n.onset));
    until = n.onset + n.duration;
  }
  for (std::size_t i = 0; i < stream.tempo.size(); ++i) {
    const auto& t = stream.tempo[i];
    if (t.usec_per_quarter == 0 || t.usec_per_quarter > 0xFFFFFF) throw SerializationError("tempo out of range");
    if (t.at < 0 || (i > 0 && t.at < stream.tempo[i - 1].at)) throw SerializationError("tempo map is not sorted");
  }

  std::vector<std::vector<std::uint8_t>> tracks;
  {
    std::vector<RawEvent> tempo;
    for (const auto& t : stream.tempo) tempo.push_back({t.at, 0, static_cast<int>(t.usec_per_quarter), {0xFF, 0, 0}});
    // 4/4, 24 clocks per click, 8 thirty-seconds per quarter
    const std::vector<std::uint8_t> timesig = {0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08};
    tracks.push_back(encode_track("tempo", std::move(tempo), timesig));
  }
  if (!stream.notes.empty()) {
    for (Track track : kTracks) {
      const auto patch = patch_for(track);
      const auto ch = static_cast<std::uint8_t>(patch.channel);
      std::vector<std::uint8_t> prelude;
      if (patch.program >= 0) prelude = {0x00, static_cast<std::uint8_t>(0xC0 | ch), static_cast<std::uint8_t>(patch.program)};
      std::vector<RawEvent> events;
      for (const auto& n : stream.notes) {
        if (n.track != track) continue;
        const auto p = static_cast<std::uint8_t>(n.pitch);
        events.push_back({n.onset, 1, n.pitch, {static_cast<std::uint8_t>(0x90 | ch), p, static_cast<std::uint8_t>(n.velocity)}});
        events.push_back({n.onset + n.duration, 0, n.pitch, {static_cast<std::uint8_t>(0x80 | ch), p, 0x40}});
      }
      tracks.push_back(encode_track(std::string(to_string(track)), std::move(events), std::move(prelude)));
    }
  }

  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> header;
  put_u16(header, 1);
  put_u16(header, static_cast<std::uint32_t>(tracks.size()));
  put_u16(header, static_cast<std::uint32_t>(kTicksPerBeat));
  put_chunk(out, "MThd", header);
  for (const auto& t : tracks) put_chunk(out, "MTrk", t);
  return out;
}

namespace smf_detail {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  void seek(std::size_t p) { pos_ = p; }

  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) throw ParseError(pos_, "unexpected end of file");
    return bytes_[pos_++];
  }
  std::uint8_t peek() const {
    if (pos_ >= bytes_.size()) throw ParseError(pos_, "unexpected end of file");
    return bytes_[pos_];
  }
  std::uint32_t u16() {
    const std::uint32_t hi = u8();
    return (hi << 8) | u8();
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint64_t vlq() {
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw ParseError(start, "variable-length quantity longer than 4 bytes");
  }
  std::string tag() {
    const std::size_t start = pos_;
    if (bytes_.size() - std::min(pos_, bytes_.size()) < 4) throw ParseError(start, "truncated chunk tag");
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError(pos_, "unexpected end of file");
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace smf_detail

/// Decodes files written by write_smf (and tolerates running status, note-on velocity 0
/// as note-off, and unknown meta or chunks).
inline EventStream read_smf(std::span<const std::uint8_t> bytes) {
  using smf_detail::Reader;
  Reader r(bytes);
  if (r.tag() != "MThd") throw ParseError(0, "missing MThd header chunk");
  const std::uint32_t header_len = r.u32();
  if (header_len < 6) throw ParseError(4, "header chunk too short");
  const std::size_t header_body = r.pos();
  const std::uint32_t format = r.u16();
  const std::uint32_t ntracks = r.u16();
  const std::uint32_t division = r.u16();
  if (format > 1) throw ParseError(header_body, "unsupported SMF format " + std::to_string(format));
  if (division != static_cast<std::uint32_t>(kTicksPerBeat))
    throw ParseError(header_body + 4, "unsupported division " + std::to_string(division));
  r.seek(header_body + header_len);

  EventStream stream;
  std::uint32_t seen_tracks = 0;
  while (seen_tracks < ntracks) {
    const std::size_t chunk_start = r.pos();
    const std::string tag = r.tag();
    const std::uint32_t len = r.u32();
    const std::size_t body_start = r.pos();
    if (bytes.size() - body_start < len) throw ParseError(chunk_start, "chunk length runs past end of file");
    if (tag != "MTrk") {
      r.skip(len);
      continue;
    }
    ++seen_tracks;
    const std::size_t body_end = body_start + len;

    std::optional<Track> track;
    std::string name = "#" + std::to_string(seen_tracks - 1);
    std::map<int, std::deque<std::pair<Tick, int>>> open;  // pitch -> (onset, velocity)
    std::vector<NoteEvent> notes;
    Tick tick = 0;
    std::uint8_t status = 0;
    bool ended = false;
    while (r.pos() < body_end && !ended) {
      tick += static_cast<Tick>(r.vlq());
      const std::size_t ev_start = r.pos();
      std::uint8_t b = r.peek();
      if (b & 0x80) {
        status = r.u8();
      } else if (status == 0) {
        throw ParseError(ev_start, "data byte without running status");
      }
      if (status == 0xFF) {
        const std::uint8_t type = r.u8();
        const std::size_t n = r.vlq();
        const std::size_t data = r.pos();
        r.skip(n);
        if (type == 0x03) {
          name.assign(reinterpret_cast<const char*>(bytes.data() + data), n);
          track = track_from_string(name);
        } else if (type == 0x51) {
          if (n != 3) throw ParseError(data, "set-tempo meta must carry 3 bytes");
          const std::uint32_t u = (static_cast<std::uint32_t>(bytes[data]) << 16) |
                                  (static_cast<std::uint32_t>(bytes[data + 1]) << 8) | bytes[data + 2];
          stream.tempo.push_back({tick, u});
        } else if (type == 0x2F) {
          ended = true;
        }
        status = 0;
        continue;
      }
      if (status == 0xF0 || status == 0xF7) {
        r.skip(r.vlq());
        status = 0;
        continue;
      }
      const std::uint8_t kind = status & 0xF0;
      const int channel = status & 0x0F;
      const bool two_bytes = kind != 0xC0 && kind != 0xD0;
      const std::uint8_t d1 = r.u8();
      const std::uint8_t d2 = two_bytes ? r.u8() : 0;
      if ((d1 | d2) & 0x80) throw ParseError(ev_start, "data byte with high bit set");
      if (kind != 0x80 && kind != 0x90) continue;
      if (!track) {
        for (Track t : kTracks)
          if (patch_for(t).channel == channel) track = t;
        if (!track) throw ParseError(ev_start, "note on unmapped channel " + std::to_string(channel) + " in track " + name);
      }
      if (kind == 0x90 && d2 > 0) {
        open[d1].push_back({tick, d2});
      } else {
        auto& q = open[d1];
        if (q.empty()) throw ParseError(ev_start, "note-off without note-on in track " + name);
        const auto [onset, vel] = q.front();
        q.pop_front();
        if (tick <= onset) throw ParseError(ev_start, "zero-length note in track " + name);
        notes.push_back({*track, d1, vel, onset, tick - onset});
      }
    }
    for (const auto& [pitch, q] : open)
      if (!q.empty())
        throw ParseError(body_end, "note-on without note-off in track " + name + " (pitch " + std::to_string(pitch) + ")");
    if (r.pos() != body_end) throw ParseError(r.pos(), "track " + name + " does not end at its chunk boundary");
    stream.notes.insert(stream.notes.end(), notes.begin(), notes.end());
  }
  std::sort(stream.notes.begin(), stream.notes.end());
  std::stable_sort(stream.tempo.begin(), stream.tempo.end(),
                   [](const TempoChange& a, const TempoChange& b) { return a.at < b.at; });
  return stream;
}

inline void save_smf(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

inline void save_smf(const std::filesystem::path& path, const EventStream& stream) {
  save_smf(path, write_smf(stream));
}

inline std::vector<std::uint8_t> load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace affpop
