"""Parses CLI output with mido, an independent MIDI library. Exits 77 when mido is absent."""
import os
import subprocess
import sys

try:
    import mido
except ImportError:
    print("mido not installed; skipping")
    sys.exit(77)

TRACKS = ["tempo", "percussion", "bass", "strummed_gtr", "plucked_gtr", "violins", "french_horn"]


def main():
    cli, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)
    failures = 0
    for val, aro, bars in [(0.0, 0.0, 4), (0.5, 0.5, 8), (1.0, 1.0, 16), (0.8, 0.2, 32)]:
        path = os.path.join(out, f"v{val}_a{aro}_{bars}.mid")
        subprocess.run([cli, "generate", "--valence", str(val), "--arousal", str(aro), "--bars", str(bars),
                        "--seed", "3", "--out", path], check=True, stdout=subprocess.DEVNULL)
        mid = mido.MidiFile(path)
        names = [next((m.name for m in t if m.type == "track_name"), None) for t in mid.tracks]
        ons = sum(1 for t in mid.tracks for m in t if m.type == "note_on" and m.velocity > 0)
        offs = sum(1 for t in mid.tracks for m in t if m.type == "note_off" or (m.type == "note_on" and m.velocity == 0))
        ok = mid.type == 1 and mid.ticks_per_beat == 480 and names == TRACKS and ons == offs and ons > 0
        print(f"{'ok' if ok else 'FAIL'} {os.path.basename(path)}: {len(mid.tracks)} tracks, {ons} notes, "
              f"{mid.length:.3f} s")
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
