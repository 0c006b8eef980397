# Copyright 2026 The Coref Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the toy training corpus used by the overfit checks.

Usage: python3 make_toy.py toy.jsonlines
"""
import json
import sys
docs = [
 ("nw/toy/00_0", "-", [
  "[0 Alice ] met [1 Bob ] downtown yesterday .",
  "[0 She ] smiled at [1 him ] warmly .",
  "Then [1 he ] bought [2 a car ] .",
  "[2 It ] was very old .",
  "[0 Alice ] still liked [2 the car ] .",
  "Later [1 Bob ] drove [0 her ] home .",
  "[0 She ] thanked [1 him ] twice ."]),
 ("bc/toy/01_0", "-", [
  "[0 Maria ] called [1 Tom ] early today .",
  "[1 He ] answered quite late .",
  "[0 She ] needed [2 the report ] urgently .",
  "[1 Tom ] had finished [2 it ] already .",
  "So [1 he ] sent [2 the report ] over .",
  "[0 Maria ] read [2 it ] very carefully .",
  "Afterwards [0 she ] praised [1 Tom ] ."]),
 ("mz/toy/02_0", "-", [
  "[0 The dog ] chased [1 the cat ] again .",
  "[1 It ] ran up [2 a tree ] .",
  "[0 The dog ] barked very loudly .",
  "Meanwhile [1 the cat ] stayed in [2 the tree ] .",
  "Eventually [0 it ] gave up .",
  "[1 The cat ] climbed down [2 the tree ] slowly ."]),
 ("wb/toy/03_0", "-", [
  "[0 Sara ] wrote [1 a long post ] yesterday .",
  "[0 She ] shared [1 it ] online .",
  "Many readers liked [1 the post ] .",
  "[2 Dan ] replied to [0 Sara ] quickly .",
  "[2 He ] also praised [1 the post ] .",
  "[0 Sara ] thanked [2 him ] politely ."]),
 ("tc/toy/04_0", "spk", [
  "[0 I ] called [1 the hotel ] today .",
  "Did [1 it ] have rooms for [0 you ] ?",
  "No , [1 the hotel ] was full .",
  "Then [0 you ] should call [2 Eve ] .",
  "Yes , [0 I ] will call [2 her ] .",
  "[2 Eve ] always knows good places ."]),
]
out = []
for key, spk, sents in docs:
  sentences, clusters, offset, speakers = [], {}, 0, []
  fill=[]
  for s in sents: fill += [s, 'Okay .']
  sents=fill
  for si, s in enumerate(sents):
    toks, stack = [], []
    for piece in s.split():
      if piece.startswith("["): stack.append((int(piece[1:]), offset + len(toks)))
      elif piece == "]":
        cid, start = stack.pop(); clusters.setdefault(cid, []).append([start, offset + len(toks) - 1])
      else: toks.append(piece)
    assert not stack
    sentences.append(toks)
    speakers.append([("spk%d" % ((si // 2) % 2)) if spk == "spk" else "-"] * len(toks))
    offset += len(toks)
  cl = sorted(sorted(c) for c in clusters.values())
  out.append({"clusters": cl, "doc_key": key, "genre": key[:2], "sentences": sentences, "speakers": speakers})
  n = sum(len(c) for c in cl)
  print(key, offset, "tokens", n, "mentions", "density %.2f" % (n / offset), "kept", -(-offset * 2 // 5))
with open(sys.argv[1], "w") as f:
  for d in out: f.write(json.dumps(d, sort_keys=True) + "\n")
