import asyncio
import logging
import os

from dotenv import load_dotenv
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from starlette.websockets import WebSocket, WebSocketDisconnect

from api.watermark import (AttackReq, AttackResp, EmbedReq, EmbedResp, EvaluateEvent, EvaluateReq, EvaluateResp,
                           ExtractReq, ExtractResp, attack, embed, evaluate, extract)

load_dotenv()
logging.basicConfig(level=os.getenv("CTWM_LOG_LEVEL", "INFO").upper(),
                    format="%(asctime)s %(levelname)s %(name)s: %(message)s")
logger = logging.getLogger(__name__)

app = FastAPI(title="Contourlet Watermarking Service")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_headers=["*"],
)


@app.post("/api/embed", response_model=EmbedResp)
async def handle_embed(req: EmbedReq):
    return await embed(req)


@app.post("/api/extract", response_model=ExtractResp)
async def handle_extract(req: ExtractReq):
    return await extract(req)


@app.post("/api/attack", response_model=AttackResp)
async def handle_attack(req: AttackReq):
    return await attack(req)


@app.post("/api/evaluate", response_model=EvaluateResp)
async def handle_evaluate(req: EvaluateReq):
    return await evaluate(req)


async def _queue_iter(q: asyncio.Queue):
    while True:
        item = await q.get()
        yield item
        q.task_done()


@app.websocket("/api/evaluate")
async def handle_evaluate_websocket(websocket: WebSocket):
    await websocket.accept()
    req = EvaluateReq.model_validate(await websocket.receive_json())
    logger.info("Streaming evaluation of %s with %d keys", req.name, len(req.keys))

    result_chan: asyncio.Queue[EvaluateEvent] = asyncio.Queue()
    evaluate_task = asyncio.create_task(evaluate(req, result_queue=result_chan))

    async def forward_to_client():
        try:
            async for event in _queue_iter(result_chan):
                await websocket.send_text(event.model_dump_json())
                if event.done:
                    await websocket.close(code=1000, reason="Evaluation completed")
                    break
        except asyncio.CancelledError:
            return

    forward_task = asyncio.create_task(forward_to_client())
    try:
        await asyncio.gather(evaluate_task, forward_task)
    except WebSocketDisconnect:
        logger.info("WebSocket disconnected")
    except Exception as e:
        logger.exception("Evaluation stream failed")
        await websocket.close(code=1011, reason=str(e))
    finally:
        evaluate_task.cancel()
        forward_task.cancel()
