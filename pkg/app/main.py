from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from typing import List
import logging
from datetime import datetime

from sympy import isprime

from .projgeom import DEFAULT_PRIMES, MAX_PRIME, ORACLE_TYPES
from .tetra_common import DataFormatError, SectionReport
from .verification_service import run_section, validate_data

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

app = FastAPI(title="Complete Tetrahedra Verification API")


class ValidationResponse(BaseModel):
    valid: bool
    problems: List[str] = []


def _split(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _parse_primes(text: str) -> List[int]:
    try:
        primes = [int(t) for t in _split(text)]
    except ValueError:
        raise HTTPException(status_code=400, detail=f"primes must be integers: {text}")
    bad = [p for p in primes if not isprime(p) or p >= MAX_PRIME]
    if bad or not primes:
        raise HTTPException(status_code=400, detail=f"not usable primes: {bad or text}")
    return primes


def _parse_types(text: str) -> List[str]:
    types = _split(text)
    bad = [t for t in types if t not in ORACLE_TYPES]
    if bad or not types:
        raise HTTPException(status_code=400, detail=f"unknown oracle types: {bad or text}")
    return types


async def _section(name: str, **options) -> JSONResponse:
    start_time = datetime.now()
    logger.info(f"[REQUEST] Section {name} {options or ''}")
    try:
        section: SectionReport = await run_section(name, **options)
        elapsed = (datetime.now() - start_time).total_seconds()
        logger.info(
            f"[SUCCESS] Section {name} completed in {elapsed:.2f}s - passed: {section.passed}"
        )
        return JSONResponse(content=section.model_dump(exclude_none=True))
    except DataFormatError as e:
        elapsed = (datetime.now() - start_time).total_seconds()
        logger.error(f"[ERROR] Section {name} failed after {elapsed:.2f}s: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))
    except Exception as e:
        elapsed = (datetime.now() - start_time).total_seconds()
        logger.error(f"[ERROR] Section {name} failed after {elapsed:.2f}s: {str(e)}")
        raise


@app.get("/strata", response_model=SectionReport)
async def get_strata():
    return await _section("strata")


@app.get("/counts", response_model=SectionReport)
async def get_counts():
    return await _section("counts")


@app.get("/oracle", response_model=SectionReport)
async def get_oracle(
    primes: str = Query(
        ",".join(map(str, DEFAULT_PRIMES)), description="Comma-separated primes, e.g. 2,3"
    ),
    types: str = Query(",".join(ORACLE_TYPES), description="Oracle types, e.g. X0,A"),
):
    return await _section(
        "oracle", primes=_parse_primes(primes), types=_parse_types(types)
    )


@app.get("/validate", response_model=ValidationResponse)
async def get_validate():
    logger.info("[REQUEST] Validating data files")
    problems = validate_data()
    payload = ValidationResponse(valid=not problems, problems=problems)
    return JSONResponse(content=payload.model_dump())


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
