#!/usr/bin/env python3
"""Create the experiment database schema."""

import argparse
import sys

from src.models import Base, create_tables
from src.utils import get_database_url


def main():
    parser = argparse.ArgumentParser(description="Initialize the experiment database")
    parser.add_argument("--database-url", default=None, help="Overrides $DATABASE_URL")
    parser.add_argument("--reset", action="store_true", help="Drop existing tables first")
    args = parser.parse_args()

    database_url = args.database_url or get_database_url()
    print(f"🔧 Initializing {database_url}")
    try:
        engine = create_tables(database_url)
        if args.reset:
            Base.metadata.drop_all(engine)
            Base.metadata.create_all(engine)
            print("⚠️  Existing experiment data dropped")
    except Exception as e:
        print(f"❌ Could not initialize the database: {e}")
        sys.exit(1)

    for table in Base.metadata.sorted_tables:
        print(f"✓ {table.name}")
    print("\n🚀 Next: python run_delegation.py calibrate --env four_way --family mask")


if __name__ == "__main__":
    main()
