#!/usr/bin/env python3
# Copyright 2026 The amrperturb Authors.
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

"""Stub adapter for protocol tests. Canned answers, no models.

entailment: 1.0 when premise == hypothesis, else 0.25
relevance:  -1.0
amr2text:   "realized: " + input
text2amr:   input unchanged

The first argument selects a misbehaviour, if any.
"""

import json
import sys
import time


def answer(request):
    task = request.get("task")
    rid = request["id"]
    if task == "entailment":
        return {"id": rid, "score": 1.0 if request["premise"] == request["hypothesis"] else 0.25}
    if task == "relevance":
        return {"id": rid, "score": -1.0}
    if task == "amr2text":
        return {"id": rid, "output": "realized: " + request["input"]}
    if task == "text2amr":
        return {"id": rid, "output": request["input"]}
    return {"id": rid, "error": "unknown task %r" % task}


def emit(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
    if mode == "bad-handshake":
        emit({"protocol": "something-else/9"})
    else:
        emit({"protocol": "amrfact-scorer/1"})
    if mode == "exit":
        return
    held = []
    count = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        count += 1
        if mode == "hang":
            time.sleep(3600)
        if mode == "malformed" and count == 2:
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()
            continue
        if mode == "drop" and count == 1:
            continue
        if mode == "unknown-id" and count == 1:
            emit({"id": "no-such-id", "score": 0.5})
            continue
        if mode == "duplicate" and count == 2:
            emit(answer({**request, "id": held_id}))
            continue
        if mode == "error" and count == 1:
            emit({"id": request["id"], "error": "model failed"})
            continue
        if mode == "out-of-range" and request.get("task") == "entailment":
            emit({"id": request["id"], "score": 1.5})
            continue
        held_id = request["id"]
        if mode == "reverse":
            held.append(answer(request))
            if len(held) == 2:
                for response in reversed(held):
                    emit(response)
                held = []
            continue
        emit(answer(request))
    for response in held:
        emit(response)


if __name__ == "__main__":
    main()
